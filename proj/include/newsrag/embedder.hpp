#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "newsrag/types.hpp"

namespace newsrag {

struct EmbedderConfig {
  enum class Kind { kDeterministic, kRemote };

  Kind kind = Kind::kDeterministic;
  std::string endpoint_url;  // remote only
  std::string model_name = "mpnet-base";
  std::size_t dim = 768;
  int timeout_ms = 10000;
  std::size_t max_batch = 64;            // texts per upstream request
  std::size_t max_texts_per_call = 10000;  // embed_batch inputs above this fail
  std::size_t max_text_chars = 20000;      // longer texts fail, never truncate
  int max_retries = 3;
  int retry_base_ms = 100;
  int max_concurrent_requests = 4;

  bool operator==(const EmbedderConfig&) const = default;
};

class Embedder {
 public:
  virtual ~Embedder() = default;

  // Returns a dim-length finite vector for non-empty text.
  // Throws Error(EmptyInput) when text trims to nothing.
  virtual EmbeddingVector embed_text(const std::string& text) = 0;

  // Order-preserving; fails the whole batch on any per-text failure.
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;

  virtual std::size_t dim() const = 0;
  virtual const std::string& model_name() const = 0;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

// Offline hashing embedder used for reproducible tests and local runs:
// lowercase, split on non-alphanumerics, hash each token (FNV-1a 64) into one
// of dim buckets, count, L2-normalize. Identical input gives identical output
// on every platform forever.
class DeterministicEmbedder final : public Embedder {
 public:
  explicit DeterministicEmbedder(std::size_t dim = 768, std::string model_name = "deterministic");

  EmbeddingVector embed_text(const std::string& text) override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
  std::size_t dim() const override { return dim_; }
  const std::string& model_name() const override { return model_name_; }

 private:
  std::size_t dim_;
  std::string model_name_;
};

// Tokenization shared by the deterministic embedder and the lexical judge:
// ASCII letters are lowercased, runs of [a-z0-9] plus bytes >= 0x80 form
// tokens, everything else separates.
std::vector<std::string> tokenize_lower(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);

// HTTP client for a hosted sentence-encoder:
// POST {endpoint_url}/embed {"model": str, "texts": [str]} -> {"vectors": [[f32]]}.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedderConfig config);
  ~RemoteEmbedder() override;

  EmbeddingVector embed_text(const std::string& text) override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
  std::size_t dim() const override { return config_.dim; }
  const std::string& model_name() const override { return config_.model_name; }

 private:
  std::vector<EmbeddingVector> request_vectors(const std::vector<std::string>& texts);

  EmbedderConfig config_;
  struct Limiter;
  std::unique_ptr<Limiter> limiter_;
};

}  // namespace newsrag

#include "newsrag/embedder.hpp"

#include <cmath>
#include <condition_variable>
#include <mutex>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"
#include "newsrag/http_client.hpp"

namespace newsrag {

using nlohmann::json;

namespace {

bool is_token_char(unsigned char c) {
  if (c >= 0x80) return true;  // keep multi-byte sequences intact
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string trim_copy(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> tokenize_lower(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                             : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

DeterministicEmbedder::DeterministicEmbedder(std::size_t dim, std::string model_name)
    : dim_(dim), model_name_(std::move(model_name)) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidConfig, "embedding dim must be positive");
}

EmbeddingVector DeterministicEmbedder::embed_text(const std::string& text) {
  if (trim_copy(text).empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot embed empty text");
  }
  std::vector<float> counts(dim_, 0.0f);
  const std::vector<std::string> tokens = tokenize_lower(text);
  if (tokens.empty()) {
    // No alphanumeric content (e.g. "!!!"): still emit a unit vector so the
    // norm contract holds for every non-empty input.
    counts[fnv1a64("") % dim_] = 1.0f;
  }
  for (const std::string& token : tokens) {
    counts[fnv1a64(token) % dim_] += 1.0f;
  }
  double norm_sq = 0.0;
  for (float v : counts) norm_sq += static_cast<double>(v) * v;
  const float inv_norm = static_cast<float>(1.0 / std::sqrt(norm_sq));
  for (float& v : counts) v *= inv_norm;
  return EmbeddingVector{std::move(counts)};
}

std::vector<EmbeddingVector> DeterministicEmbedder::embed_batch(const std::vector<std::string>& texts) {
  if (texts.empty()) {
    throw Error(ErrorCode::EmptyInput, "embed_batch requires at least one text");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(embed_text(t));
  return out;
}

// --- remote client -------------------------------------------------------

struct RemoteEmbedder::Limiter {
  std::mutex mutex;
  std::condition_variable cv;
  int in_flight = 0;
  int cap;

  explicit Limiter(int cap_) : cap(cap_) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mutex);
    cv.wait(lock, [&] { return in_flight < cap; });
    ++in_flight;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mutex);
      --in_flight;
    }
    cv.notify_one();
  }
};

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config)
    : config_(std::move(config)),
      limiter_(std::make_unique<Limiter>(std::max(1, config_.max_concurrent_requests))) {
  if (config_.dim == 0) throw Error(ErrorCode::InvalidConfig, "embedding dim must be positive");
  parse_http_endpoint(config_.endpoint_url);  // fail fast on malformed URLs
}

RemoteEmbedder::~RemoteEmbedder() = default;

std::vector<EmbeddingVector> RemoteEmbedder::request_vectors(const std::vector<std::string>& texts) {
  const json body = {{"model", config_.model_name}, {"texts", texts}};

  limiter_->acquire();
  HttpResponse response;
  try {
    response = post_json_with_retry(parse_http_endpoint(config_.endpoint_url), "/embed",
                                    body.dump(), config_.timeout_ms, config_.max_retries,
                                    config_.retry_base_ms);
  } catch (...) {
    limiter_->release();
    throw;
  }
  limiter_->release();

  json parsed;
  try {
    parsed = json::parse(response.body);
  } catch (const json::exception&) {
    throw EndpointError(response.status, true, "embedding endpoint returned malformed JSON");
  }
  if (!parsed.contains("vectors") || !parsed.at("vectors").is_array() ||
      parsed.at("vectors").size() != texts.size()) {
    throw EndpointError(response.status, false, "embedding endpoint returned wrong vector count");
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& row : parsed.at("vectors")) {
    EmbeddingVector v{row.get<std::vector<float>>()};
    if (v.dim() != config_.dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(config_.dim) + ", got " + std::to_string(v.dim()));
    }
    if (!v.all_finite()) {
      throw Error(ErrorCode::NonFiniteVector, "embedding endpoint returned non-finite values");
    }
    out.push_back(std::move(v));
  }
  return out;
}

EmbeddingVector RemoteEmbedder::embed_text(const std::string& text) {
  if (trim_copy(text).empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot embed empty text");
  }
  if (text.size() > config_.max_text_chars) {
    throw Error(ErrorCode::TextTooLong, "text of " + std::to_string(text.size()) +
                                            " chars exceeds limit " +
                                            std::to_string(config_.max_text_chars));
  }
  return request_vectors({text}).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) {
  if (texts.empty()) {
    throw Error(ErrorCode::EmptyInput, "embed_batch requires at least one text");
  }
  if (texts.size() > config_.max_texts_per_call) {
    throw Error(ErrorCode::BatchTooLarge, std::to_string(texts.size()) + " texts exceeds limit " +
                                              std::to_string(config_.max_texts_per_call));
  }
  for (const std::string& t : texts) {
    if (trim_copy(t).empty()) throw Error(ErrorCode::EmptyInput, "batch contains empty text");
    if (t.size() > config_.max_text_chars) {
      throw Error(ErrorCode::TextTooLong, "batch text exceeds limit " +
                                              std::to_string(config_.max_text_chars));
    }
  }

  // Split into <= max_batch requests; any sub-request failure throws before
  // results are returned, so the batch is all-or-nothing.
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t offset = 0; offset < texts.size(); offset += config_.max_batch) {
    const std::size_t n = std::min(config_.max_batch, texts.size() - offset);
    std::vector<std::string> slice(texts.begin() + offset, texts.begin() + offset + n);
    std::vector<EmbeddingVector> part = request_vectors(slice);
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
  switch (config.kind) {
    case EmbedderConfig::Kind::kDeterministic:
      return std::make_unique<DeterministicEmbedder>(config.dim);
    case EmbedderConfig::Kind::kRemote:
      return std::make_unique<RemoteEmbedder>(config);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown embedder kind");
}

}  // namespace newsrag

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "newsrag/embedder.hpp"
#include "newsrag/llm_client.hpp"
#include "newsrag/prompt_template.hpp"
#include "newsrag/types.hpp"
#include "newsrag/vector_index.hpp"

namespace newsrag {

struct EngineConfig {
  std::size_t k = 4;  // retrieval depth, matches the model's context template
  SearchFilter filter;
  bool use_rag = true;
  std::string template_version = std::string(kTemplateVersion);
  // Rendered prompts above this budget drop the lowest-ranked contexts whole;
  // chunks are never truncated mid-text.
  std::size_t prompt_char_budget = 24000;
};

struct BatchAnswer {
  std::optional<Answer> answer;
  std::optional<std::string> error;  // code-prefixed message when the question failed
};

// Full pipeline per question: embed -> top-k retrieve -> render -> complete.
// Stateless per request; shares the index read-side, so concurrent answer()
// calls are safe.
class RagEngine {
 public:
  RagEngine(std::shared_ptr<const VectorIndex> index, std::shared_ptr<Embedder> embedder,
            std::shared_ptr<ChatClient> chat);

  Answer answer(const std::string& question, const EngineConfig& config) const;

  // Order-preserving; a failing question yields an error entry and the batch
  // continues.
  std::vector<BatchAnswer> answer_batch(const std::vector<std::string>& questions,
                                        const EngineConfig& config) const;

  std::shared_ptr<const VectorIndex> index() const { return index_; }
  std::shared_ptr<Embedder> embedder() const { return embedder_; }

 private:
  std::shared_ptr<const VectorIndex> index_;
  std::shared_ptr<Embedder> embedder_;
  std::shared_ptr<ChatClient> chat_;
};

}  // namespace newsrag

#include "newsrag/rag_engine.hpp"

#include <cctype>

#include "newsrag/error.hpp"
#include "newsrag/logging.hpp"

namespace newsrag {
namespace {

bool is_blank(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

RagEngine::RagEngine(std::shared_ptr<const VectorIndex> index, std::shared_ptr<Embedder> embedder,
                     std::shared_ptr<ChatClient> chat)
    : index_(std::move(index)), embedder_(std::move(embedder)), chat_(std::move(chat)) {}

Answer RagEngine::answer(const std::string& question, const EngineConfig& config) const {
  if (is_blank(question)) {
    throw Error(ErrorCode::EmptyQuestion, "question must be non-empty");
  }

  std::vector<SearchHit> hits;
  std::vector<std::string> contexts;
  std::string prompt;

  if (config.use_rag) {
    if (!index_ || index_->size() == 0) {
      throw Error(ErrorCode::IndexEmpty, "RAG answering requires a loaded, non-empty index");
    }
    const EmbeddingVector query_vec = embedder_->embed_text(question);
    hits = index_->search(query_vec, config.k, config.filter);
    contexts.reserve(hits.size());
    for (const SearchHit& hit : hits) {
      contexts.push_back(index_->find_chunk(hit.chunk_id)->text);
    }

    prompt = render_with_context(question, contexts);
    while (prompt.size() > config.prompt_char_budget && !contexts.empty()) {
      contexts.pop_back();
      hits.pop_back();
      prompt = render_with_context(question, contexts);
    }
    if (prompt.size() > config.prompt_char_budget) {
      log_warn("prompt exceeds budget even without contexts",
               {{"chars", std::to_string(prompt.size())}});
    }
  } else {
    prompt = render_plain(question);
  }

  Answer answer;
  answer.text = chat_->complete(prompt);
  answer.sources = std::move(hits);
  answer.query = question;
  answer.model_id = chat_->model_id();
  answer.template_version = config.template_version;
  return answer;
}

std::vector<BatchAnswer> RagEngine::answer_batch(const std::vector<std::string>& questions,
                                                 const EngineConfig& config) const {
  if (questions.empty()) {
    throw Error(ErrorCode::EmptyInput, "answer_batch requires at least one question");
  }
  std::vector<BatchAnswer> out(questions.size());
  for (std::size_t i = 0; i < questions.size(); ++i) {
    try {
      out[i].answer = answer(questions[i], config);
    } catch (const std::exception& e) {
      out[i].error = e.what();
      log_warn("question failed", {{"position", std::to_string(i)}, {"error", e.what()}});
    }
  }
  return out;
}

}  // namespace newsrag

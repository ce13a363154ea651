#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsrag/embedder.hpp"
#include "newsrag/llm_client.hpp"
#include "newsrag/rag_engine.hpp"
#include "newsrag/types.hpp"

namespace newsrag {

struct EvalSample {
  std::string question;
  std::string ground_truth;
  std::vector<std::string> retrieved_contexts;  // retrieval rank order
  std::string generated_answer;
};

struct JudgeConfig {
  enum class Kind { kLexical, kLlm };
  enum class Splitter { kSentence, kLlm };

  Kind kind = Kind::kLexical;
  std::optional<std::string> endpoint;  // chat endpoint for the llm judge
  double overlap_threshold = 0.6;       // tau: content-token recall cutoff
  Splitter statement_splitter = Splitter::kSentence;
  double correctness_weight = 0.75;  // w: F1 share in answer correctness
  int relevance_questions = 3;       // M: questions generated per answer
};

// Attribution and relevance decisions behind the four metrics. The lexical
// judge is fully deterministic and needs no endpoint; the llm judge delegates
// statement extraction / relevance to a chat endpoint.
class Judge {
 public:
  explicit Judge(JudgeConfig config, std::shared_ptr<ChatClient> chat = nullptr);

  const JudgeConfig& config() const { return config_; }

  // Sentence mode: split on terminal punctuation followed by whitespace,
  // drop fragments under 3 tokens; when nothing survives, the whole text
  // counts as one statement so downstream ratios stay defined.
  std::vector<std::string> split_statements(const std::string& text) const;

  // Lexical rule: content-token recall of the statement against the context
  // is at least tau.
  bool statement_attributable(const std::string& statement, const std::string& context) const;

  // One 0/1 relevance flag per context, in rank order, against ground truth.
  std::vector<int> context_relevance_flags(const EvalSample& sample) const;

  // LLM judge only: questions the answer would be answering (M of them).
  std::vector<std::string> questions_for_answer(const std::string& answer) const;

 private:
  JudgeConfig config_;
  std::shared_ptr<ChatClient> chat_;
};

// --- metric kernels (pure formulas, directly testable) -------------------

// CP = sum_k(P@k * v_k) / max(1, sum_k v_k), P@k = (sum_{i<=k} v_i) / k.
double context_precision_from_flags(const std::vector<int>& flags);

// F1 = 2TP / (2TP + FP + FN); AC = w * F1 + (1 - w) * max(0, semantic_cos).
double answer_correctness_from_counts(int tp, int fp, int fn, double semantic_cos, double w);

double context_recall_from_counts(std::size_t attributed, std::size_t total);

// --- metric operations ----------------------------------------------------
// All results land in [0, 1]; negative cosines clip to 0.

double context_recall(const EvalSample& sample, const Judge& judge);
double context_precision(const EvalSample& sample, const Judge& judge);
double answer_correctness(const EvalSample& sample, const Judge& judge, Embedder& embedder);
// degraded_mode is set true when the lexical fallback (answer vs question
// cosine) was used instead of llm-generated questions.
double answer_relevance(const EvalSample& sample, const Judge& judge, Embedder& embedder,
                        bool* degraded_mode = nullptr);

// --- evaluation runner -----------------------------------------------------

struct SampleScore {
  std::string question;
  std::optional<double> context_recall;     // null for "no rag" runs
  std::optional<double> context_precision;  // null for "no rag" runs
  std::optional<double> answer_correctness;
  std::optional<double> answer_relevance;
  std::optional<std::string> error;  // per-sample failure, run continues
};

struct EvalSummaryRow {
  std::string model;
  std::string setting;  // "rag" | "no rag"
  std::optional<double> context_recall;
  std::optional<double> context_precision;
  std::optional<double> answer_correctness;
  std::optional<double> answer_relevance;
};

struct EvalReport {
  EvalSummaryRow summary;
  std::vector<SampleScore> samples;
  bool relevance_degraded = false;
  nlohmann::json provenance() const;  // judge/config block for attribution
  std::string model;
  std::string setting;
  JudgeConfig judge_config;
  std::string embedder_model;
  std::string template_version;
  std::size_t k = 4;
};

nlohmann::json eval_report_to_json(const EvalReport& report);
// Text table in the evaluation summary layout:
// Model | Setting | CR | CP | AC | AR with "-" for null cells.
std::string render_report_table(const EvalReport& report);

struct EvalRunOptions {
  int concurrency = 4;
};

// Answers every pair through the engine, scores each sample, and aggregates
// corpus means. "no rag" runs leave CR/CP null.
EvalReport run_eval(const std::vector<QAPair>& eval_set, const RagEngine& engine,
                    const EngineConfig& engine_config, const Judge& judge, Embedder& embedder,
                    const EvalRunOptions& options = {});

}  // namespace newsrag

#include "newsrag/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"
#include "newsrag/logging.hpp"
#include "newsrag/vector_index.hpp"

namespace newsrag {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

std::size_t whitespace_token_count(std::string_view s) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : s) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

// Content tokens for lexical attribution: lowercase alphanumeric runs of
// length >= 2 (single letters carry no signal).
std::unordered_set<std::string> content_token_set(const std::string& text) {
  std::unordered_set<std::string> set;
  for (std::string& t : tokenize_lower(text)) {
    if (t.size() >= 2) set.insert(std::move(t));
  }
  return set;
}

double clip01(double v) { return std::max(0.0, std::min(1.0, v)); }

std::optional<double> mean_of(const std::vector<SampleScore>& samples,
                              std::optional<double> SampleScore::* field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const SampleScore& s : samples) {
    if (s.error || !(s.*field)) continue;
    sum += *(s.*field);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string format_cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

json optional_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

Judge::Judge(JudgeConfig config, std::shared_ptr<ChatClient> chat)
    : config_(config), chat_(std::move(chat)) {
  if (config_.overlap_threshold <= 0.0 || config_.overlap_threshold > 1.0) {
    throw Error(ErrorCode::InvalidConfig, "overlap_threshold must be in (0, 1]");
  }
  if (config_.kind == JudgeConfig::Kind::kLlm && !chat_) {
    throw Error(ErrorCode::InvalidConfig, "llm judge requires a chat client");
  }
}

std::vector<std::string> Judge::split_statements(const std::string& text) const {
  if (trim(text).empty()) {
    throw Error(ErrorCode::EmptyText, "cannot split empty text");
  }

  if (config_.statement_splitter == JudgeConfig::Splitter::kLlm && chat_) {
    const std::string prompt =
        "List every atomic factual claim in the following text, one per line, "
        "numbered \"1.\", \"2.\", ... Output only the numbered claims.\n\nText:\n" +
        text + "\n";
    std::vector<std::string> statements;
    std::istringstream lines(chat_->complete(prompt));
    std::string line;
    while (std::getline(lines, line)) {
      std::string cleaned = trim(line);
      const auto dot = cleaned.find('.');
      if (dot != std::string::npos && dot > 0 &&
          std::all_of(cleaned.begin(), cleaned.begin() + static_cast<std::ptrdiff_t>(dot),
                      [](char c) { return c >= '0' && c <= '9'; })) {
        cleaned = trim(cleaned.substr(dot + 1));
      }
      if (!cleaned.empty()) statements.push_back(cleaned);
    }
    if (!statements.empty()) return statements;
    // fall through to the sentence rule when the endpoint returns nothing
  }

  std::vector<std::string> statements;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    current.push_back(text[i]);
    const bool at_end = i + 1 == text.size();
    if (is_terminal(text[i]) &&
        (at_end || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
      const std::string sentence = trim(current);
      if (whitespace_token_count(sentence) >= 3) statements.push_back(sentence);
      current.clear();
    }
  }
  const std::string tail = trim(current);
  if (whitespace_token_count(tail) >= 3) statements.push_back(tail);

  // Nothing survived the 3-token rule: treat the whole text as a single
  // statement so recall/correctness ratios stay defined.
  if (statements.empty()) statements.push_back(trim(text));
  return statements;
}

bool Judge::statement_attributable(const std::string& statement, const std::string& context) const {
  if (config_.kind == JudgeConfig::Kind::kLlm && chat_) {
    const std::string prompt = "Context:\n" + context + "\n\nStatement: " + statement +
                               "\n\nCan the statement be attributed to the context? "
                               "Answer with exactly one word, yes or no.\n";
    const std::string verdict = trim(chat_->complete(prompt));
    return !verdict.empty() && (verdict[0] == 'y' || verdict[0] == 'Y');
  }

  const std::unordered_set<std::string> statement_tokens = content_token_set(statement);
  if (statement_tokens.empty()) return false;
  const std::unordered_set<std::string> context_tokens = content_token_set(context);
  std::size_t hit = 0;
  for (const std::string& t : statement_tokens) {
    if (context_tokens.contains(t)) ++hit;
  }
  const double recall = static_cast<double>(hit) / static_cast<double>(statement_tokens.size());
  return recall >= config_.overlap_threshold;
}

std::vector<int> Judge::context_relevance_flags(const EvalSample& sample) const {
  const std::vector<std::string> gt_statements = split_statements(sample.ground_truth);
  std::vector<int> flags;
  flags.reserve(sample.retrieved_contexts.size());
  for (const std::string& context : sample.retrieved_contexts) {
    bool relevant = false;
    for (const std::string& statement : gt_statements) {
      if (statement_attributable(statement, context)) {
        relevant = true;
        break;
      }
    }
    flags.push_back(relevant ? 1 : 0);
  }
  return flags;
}

std::vector<std::string> Judge::questions_for_answer(const std::string& answer) const {
  if (config_.kind != JudgeConfig::Kind::kLlm || !chat_) return {};
  const std::string prompt =
      "Write exactly " + std::to_string(config_.relevance_questions) +
      " standalone questions that the following answer would be answering, one per line, "
      "numbered \"1.\", \"2.\", ... Output only the questions.\n\nAnswer:\n" +
      answer + "\n";
  std::vector<std::string> questions;
  std::istringstream lines(chat_->complete(prompt));
  std::string line;
  while (std::getline(lines, line)) {
    std::string cleaned = trim(line);
    const auto dot = cleaned.find('.');
    if (dot != std::string::npos && dot > 0 &&
        std::all_of(cleaned.begin(), cleaned.begin() + static_cast<std::ptrdiff_t>(dot),
                    [](char c) { return c >= '0' && c <= '9'; })) {
      cleaned = trim(cleaned.substr(dot + 1));
    }
    if (!cleaned.empty()) questions.push_back(cleaned);
    if (questions.size() == static_cast<std::size_t>(config_.relevance_questions)) break;
  }
  return questions;
}

// --- kernels ---------------------------------------------------------------

double context_precision_from_flags(const std::vector<int>& flags) {
  double weighted = 0.0;
  int relevant = 0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    relevant += flags[k];
    if (flags[k]) {
      weighted += static_cast<double>(relevant) / static_cast<double>(k + 1);
    }
  }
  return weighted / std::max(1, relevant);
}

double answer_correctness_from_counts(int tp, int fp, int fn, double semantic_cos, double w) {
  const int denom = 2 * tp + fp + fn;
  const double f1 = denom == 0 ? 0.0 : 2.0 * tp / denom;
  return w * f1 + (1.0 - w) * std::max(0.0, std::min(1.0, semantic_cos));
}

double context_recall_from_counts(std::size_t attributed, std::size_t total) {
  if (total == 0) return 0.0;
  return static_cast<double>(attributed) / static_cast<double>(total);
}

// --- operations --------------------------------------------------------------

double context_recall(const EvalSample& sample, const Judge& judge) {
  if (trim(sample.ground_truth).empty()) {
    throw Error(ErrorCode::EmptyGroundTruth, "context recall needs a ground truth");
  }
  const std::vector<std::string> statements = judge.split_statements(sample.ground_truth);
  std::size_t attributed = 0;
  for (const std::string& statement : statements) {
    for (const std::string& context : sample.retrieved_contexts) {
      if (judge.statement_attributable(statement, context)) {
        ++attributed;
        break;
      }
    }
  }
  return context_recall_from_counts(attributed, statements.size());
}

double context_precision(const EvalSample& sample, const Judge& judge) {
  return context_precision_from_flags(judge.context_relevance_flags(sample));
}

double answer_correctness(const EvalSample& sample, const Judge& judge, Embedder& embedder) {
  if (trim(sample.generated_answer).empty() || trim(sample.ground_truth).empty()) {
    throw Error(ErrorCode::EmptyInput, "answer correctness needs both answer and ground truth");
  }

  const std::vector<std::string> answer_statements = judge.split_statements(sample.generated_answer);
  const std::vector<std::string> gt_statements = judge.split_statements(sample.ground_truth);

  int tp = 0, fp = 0, fn = 0;
  for (const std::string& s : answer_statements) {
    judge.statement_attributable(s, sample.ground_truth) ? ++tp : ++fp;
  }
  for (const std::string& s : gt_statements) {
    if (!judge.statement_attributable(s, sample.generated_answer)) ++fn;
  }

  const double semantic = cosine_similarity(embedder.embed_text(sample.generated_answer),
                                            embedder.embed_text(sample.ground_truth));
  return answer_correctness_from_counts(tp, fp, fn, semantic, judge.config().correctness_weight);
}

double answer_relevance(const EvalSample& sample, const Judge& judge, Embedder& embedder,
                        bool* degraded_mode) {
  if (trim(sample.generated_answer).empty()) {
    throw Error(ErrorCode::EmptyAnswer, "answer relevance needs a generated answer");
  }
  if (degraded_mode) *degraded_mode = false;

  const EmbeddingVector question_vec = embedder.embed_text(sample.question);
  const std::vector<std::string> generated = judge.questions_for_answer(sample.generated_answer);
  if (!generated.empty()) {
    double sum = 0.0;
    for (const std::string& q : generated) {
      sum += std::max(0.0, cosine_similarity(embedder.embed_text(q), question_vec));
    }
    return clip01(sum / static_cast<double>(generated.size()));
  }

  if (degraded_mode) *degraded_mode = true;
  const double cos =
      cosine_similarity(embedder.embed_text(sample.generated_answer), question_vec);
  return clip01(std::max(0.0, cos));
}

// --- runner --------------------------------------------------------------------

EvalReport run_eval(const std::vector<QAPair>& eval_set, const RagEngine& engine,
                    const EngineConfig& engine_config, const Judge& judge, Embedder& embedder,
                    const EvalRunOptions& options) {
  if (eval_set.empty()) {
    throw Error(ErrorCode::EmptyInput, "evaluation set is empty");
  }

  std::vector<SampleScore> scores(eval_set.size());
  std::vector<char> degraded(eval_set.size(), 0);
  std::vector<std::string> model_ids(eval_set.size());

  std::atomic<std::size_t> next{0};
  const auto run_one = [&](std::size_t i) {
    SampleScore& score = scores[i];
    score.question = eval_set[i].instruction;
    try {
      const Answer answer = engine.answer(eval_set[i].instruction, engine_config);
      model_ids[i] = answer.model_id;

      EvalSample sample;
      sample.question = eval_set[i].instruction;
      sample.ground_truth = eval_set[i].output;
      sample.generated_answer = answer.text;
      if (engine_config.use_rag) {
        const auto index = engine.index();
        for (const SearchHit& hit : answer.sources) {
          sample.retrieved_contexts.push_back(index->find_chunk(hit.chunk_id)->text);
        }
      }

      if (engine_config.use_rag) {
        score.context_recall = context_recall(sample, judge);
        score.context_precision = context_precision(sample, judge);
      }
      score.answer_correctness = answer_correctness(sample, judge, embedder);
      bool sample_degraded = false;
      score.answer_relevance = answer_relevance(sample, judge, embedder, &sample_degraded);
      degraded[i] = sample_degraded ? 1 : 0;
    } catch (const std::exception& e) {
      score.error = e.what();
      log_warn("evaluation sample failed", {{"question", eval_set[i].instruction},
                                            {"error", e.what()}});
    }
  };

  const int workers =
      std::max(1, std::min<int>(options.concurrency, static_cast<int>(eval_set.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < eval_set.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < eval_set.size(); i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  report.samples = std::move(scores);
  report.judge_config = judge.config();
  report.embedder_model = embedder.model_name();
  report.template_version = engine_config.template_version;
  report.k = engine_config.k;
  report.setting = engine_config.use_rag ? "rag" : "no rag";
  for (char d : degraded) {
    if (d) report.relevance_degraded = true;
  }
  // All answers in a run share one endpoint, so the first successful
  // answer's model_id labels the row.
  for (const std::string& id : model_ids) {
    if (!id.empty()) {
      report.model = id;
      break;
    }
  }

  report.summary.model = report.model;
  report.summary.setting = report.setting;
  report.summary.context_recall = mean_of(report.samples, &SampleScore::context_recall);
  report.summary.context_precision = mean_of(report.samples, &SampleScore::context_precision);
  report.summary.answer_correctness = mean_of(report.samples, &SampleScore::answer_correctness);
  report.summary.answer_relevance = mean_of(report.samples, &SampleScore::answer_relevance);
  return report;
}

json EvalReport::provenance() const {
  return json{
      {"judge_kind", judge_config.kind == JudgeConfig::Kind::kLlm ? "llm" : "lexical"},
      {"statement_splitter",
       judge_config.statement_splitter == JudgeConfig::Splitter::kLlm ? "llm" : "sentence"},
      {"overlap_threshold", judge_config.overlap_threshold},
      {"correctness_weight", judge_config.correctness_weight},
      {"relevance_questions", judge_config.relevance_questions},
      {"embedder_model", embedder_model},
      {"template_version", template_version},
      {"k", k},
      {"relevance_degraded", relevance_degraded},
  };
}

json eval_report_to_json(const EvalReport& report) {
  json samples = json::array();
  for (const SampleScore& s : report.samples) {
    json row{
        {"question", s.question},
        {"context_recall", optional_to_json(s.context_recall)},
        {"context_precision", optional_to_json(s.context_precision)},
        {"answer_correctness", optional_to_json(s.answer_correctness)},
        {"answer_relevance", optional_to_json(s.answer_relevance)},
    };
    if (s.error) row["error"] = *s.error;
    samples.push_back(std::move(row));
  }
  return json{
      {"summary",
       {{"model", report.summary.model},
        {"setting", report.summary.setting},
        {"context_recall", optional_to_json(report.summary.context_recall)},
        {"context_precision", optional_to_json(report.summary.context_precision)},
        {"answer_correctness", optional_to_json(report.summary.answer_correctness)},
        {"answer_relevance", optional_to_json(report.summary.answer_relevance)}}},
      {"samples", samples},
      {"provenance", report.provenance()},
  };
}

std::string render_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "Model | Setting | CR | CP | AC | AR\n";
  out << report.summary.model << " | " << report.summary.setting << " | "
      << format_cell(report.summary.context_recall) << " | "
      << format_cell(report.summary.context_precision) << " | "
      << format_cell(report.summary.answer_correctness) << " | "
      << format_cell(report.summary.answer_relevance) << "\n";
  return out.str();
}

}  // namespace newsrag

#include "newsrag/qa_generator.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"
#include "newsrag/llm_client.hpp"
#include "newsrag/logging.hpp"

namespace newsrag {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Start-of-block marker: "<number>. Q:" or "<number>) Q:".
// Returns the question text offset, or npos.
std::size_t match_block_start(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  const std::size_t digits_begin = i;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  if (i == digits_begin) return std::string_view::npos;
  if (i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::string_view::npos;
  ++i;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i + 1 >= line.size() || line[i] != 'Q' || line[i + 1] != ':') return std::string_view::npos;
  return i + 2;
}

std::size_t match_answer_start(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i + 1 >= line.size() || line[i] != 'A' || line[i + 1] != ':') return std::string_view::npos;
  return i + 2;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

}  // namespace

std::string build_selfinstruct_prompt(const Document& doc, int n) {
  if (doc.page_content.empty()) {
    throw Error(ErrorCode::EmptyInput, "document has no content");
  }
  if (n <= 0 || n > kMaxPairsPerDocument) {
    throw Error(ErrorCode::InvalidConfig,
                "target pair count must be in [1, " + std::to_string(kMaxPairsPerDocument) + "]");
  }

  std::string prompt;
  prompt.append("You are given the transcript of a broadcast news recording.\n");
  prompt.append("Generate exactly ");
  prompt.append(std::to_string(n));
  prompt.append(" question and answer pairs from it.\n\nRequirements:\n");
  prompt.append("- Detailed, conversational questions and answers, as a viewer would ask them.\n");
  prompt.append("- Cover the whole transcript without repetition.\n");
  prompt.append("- Answers must be grounded in the transcript only.\n");
  prompt.append("- Output nothing but numbered blocks in exactly this format:\n");
  prompt.append("1. Q: <question>\nA: <answer>\n\nTranscript:\n");
  prompt.append(doc.page_content);
  prompt.push_back('\n');
  return prompt;
}

ParsedQaResponse parse_qa_response(const std::string& raw, const Document& doc) {
  ParsedQaResponse result;

  std::string question, answer;
  bool in_block = false, in_answer = false;

  const auto flush_block = [&] {
    if (!in_block) return;
    const std::string q = trim(question), a = trim(answer);
    if (!q.empty() && in_answer && !a.empty()) {
      QAPair pair;
      pair.instruction = q;
      pair.output = a;
      pair.language = doc.metadata.language;
      pair.source_recording_id = doc.metadata.recording_id;
      result.pairs.push_back(std::move(pair));
    } else {
      ++result.dropped_blocks;
    }
    question.clear();
    answer.clear();
    in_block = in_answer = false;
  };

  for (std::string_view line : split_lines(raw)) {
    if (const auto q_off = match_block_start(line); q_off != std::string_view::npos) {
      flush_block();
      in_block = true;
      question = trim(line.substr(q_off));
      continue;
    }
    if (!in_block) continue;  // preamble chatter before the first block
    if (!in_answer) {
      if (const auto a_off = match_answer_start(line); a_off != std::string_view::npos) {
        in_answer = true;
        answer = trim(line.substr(a_off));
      } else {
        if (!question.empty() && !trim(line).empty()) question += ' ';
        question += trim(line);
      }
    } else {
      if (!trim(line).empty()) {
        if (!answer.empty()) answer += ' ';
        answer += trim(line);
      }
    }
  }
  flush_block();

  if (result.pairs.empty()) {
    throw Error(ErrorCode::NoPairsFound, "no well-formed Q/A blocks in response");
  }
  return result;
}

std::string render_qa_pairs(const std::vector<QAPair>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.append(std::to_string(i + 1));
    out.append(". Q: ");
    out.append(pairs[i].instruction);
    out.append("\nA: ");
    out.append(pairs[i].output);
    out.append("\n\n");
  }
  return out;
}

std::string normalize_instruction(std::string_view instruction) {
  std::string out;
  out.reserve(instruction.size());
  bool pending_space = false;
  for (unsigned char c : instruction) {
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    const bool keep = c >= 0x80 || std::isalnum(c);
    if (!keep) continue;  // punctuation
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                       : static_cast<char>(c));
  }
  return out;
}

std::vector<QAPair> dedup_pairs(const std::vector<QAPair>& pairs) {
  std::vector<QAPair> out;
  std::unordered_set<std::string> seen;
  out.reserve(pairs.size());
  for (const QAPair& p : pairs) {
    if (seen.insert(normalize_instruction(p.instruction)).second) {
      out.push_back(p);
    }
  }
  return out;
}

QaGenerationReport generate_qa_corpus(const std::vector<Document>& docs,
                                      const QaGenerationConfig& config, ChatClient& chat) {
  if (config.target_pairs <= 0 || config.target_pairs > kMaxPairsPerDocument) {
    throw Error(ErrorCode::InvalidConfig, "target_pairs out of range");
  }

  struct Slot {
    std::vector<QAPair> pairs;
    int dropped = 0;
    std::optional<QaDocumentFailure> failure;
  };
  std::vector<Slot> slots(docs.size());

  std::atomic<std::size_t> next{0};
  const auto run_one = [&](std::size_t i) {
    try {
      const std::string prompt = build_selfinstruct_prompt(docs[i], config.target_pairs);
      const std::string response = chat.complete(prompt);
      ParsedQaResponse parsed = parse_qa_response(response, docs[i]);
      slots[i].pairs = dedup_pairs(parsed.pairs);
      slots[i].dropped = parsed.dropped_blocks;
    } catch (const std::exception& e) {
      slots[i].failure = QaDocumentFailure{docs[i].doc_id, e.what()};
    }
  };

  const int workers =
      std::max(1, std::min<int>(config.concurrency, static_cast<int>(docs.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  QaGenerationReport report;
  for (Slot& s : slots) {
    ++report.documents_processed;
    if (s.failure) {
      log_warn("qa generation failed", {{"doc", s.failure->doc_id}, {"error", s.failure->message}});
      report.failures.push_back(std::move(*s.failure));
      continue;
    }
    report.dropped_blocks += s.dropped;
    for (QAPair& p : s.pairs) report.pairs.push_back(std::move(p));
  }
  return report;
}

json qa_manifest_json(const std::vector<QAPair>& fine_tune, const std::vector<QAPair>& evaluation) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const QAPair& p : fine_tune) counts[p.language].first += 1;
  for (const QAPair& p : evaluation) counts[p.language].second += 1;

  json rows = json::array();
  for (const auto& [language, c] : counts) {
    rows.push_back({{"language", language}, {"fine_tune", c.first}, {"evaluation", c.second}});
  }
  return json{{"columns", {"language", "fine_tune", "evaluation"}}, {"rows", rows}};
}

std::vector<QAPair> read_qa_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<QAPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      pairs.push_back(json::parse(line).get<QAPair>());
    } catch (const json::exception& e) {
      throw ParseError(ErrorCode::MalformedLine, line_no, e.what());
    }
  }
  return pairs;
}

void write_qa_jsonl(const std::filesystem::path& path, const std::vector<QAPair>& pairs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (const QAPair& p : pairs) out << json(p).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace newsrag

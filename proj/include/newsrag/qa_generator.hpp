#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsrag/types.hpp"

namespace newsrag {

class ChatClient;

inline constexpr std::string_view kSelfInstructPromptVersion = "selfinstruct/v1";
inline constexpr int kMaxPairsPerDocument = 50;  // runaway guard

struct GenerationJob {
  Document document;
  int target_pairs = 10;
  std::string prompt_version = std::string(kSelfInstructPromptVersion);
  std::string model_id;
};

// Instruction prompt sent to the chat endpoint: embeds the transcript
// verbatim, demands exactly n conversational pairs covering the whole
// transcript without repetition, and pins the numbered "Q:"/"A:" output
// grammar that parse_qa_response understands.
std::string build_selfinstruct_prompt(const Document& doc, int n);

struct ParsedQaResponse {
  std::vector<QAPair> pairs;
  int dropped_blocks = 0;  // malformed blocks skipped, not fatal
};

// Extracts well-formed numbered Q/A blocks; provenance (language,
// source_recording_id) comes from the document. Throws Error(NoPairsFound)
// when no block parses.
ParsedQaResponse parse_qa_response(const std::string& raw, const Document& doc);

// The grammar parse_qa_response reads; rendering then parsing a pair list of
// single-line questions and answers recovers it exactly.
std::string render_qa_pairs(const std::vector<QAPair>& pairs);

// Drops pairs whose normalized instruction (lowercase, punctuation stripped,
// whitespace collapsed) repeats an earlier one. Stable; first wins.
std::vector<QAPair> dedup_pairs(const std::vector<QAPair>& pairs);

std::string normalize_instruction(std::string_view instruction);

struct QaGenerationConfig {
  int target_pairs = 10;
  int concurrency = 4;
};

struct QaDocumentFailure {
  std::string doc_id;
  std::string message;
};

struct QaGenerationReport {
  std::vector<QAPair> pairs;
  std::size_t documents_processed = 0;
  std::vector<QaDocumentFailure> failures;  // generation continues past these
  int dropped_blocks = 0;
};

// One Self-Instruct round per document; per-document failures are recorded
// and the batch continues.
QaGenerationReport generate_qa_corpus(const std::vector<Document>& docs,
                                      const QaGenerationConfig& config, ChatClient& chat);

// Dataset release manifest: one row per language with fine-tune/evaluation
// pair counts.
nlohmann::json qa_manifest_json(const std::vector<QAPair>& fine_tune,
                                const std::vector<QAPair>& evaluation);

std::vector<QAPair> read_qa_jsonl(const std::filesystem::path& path);
void write_qa_jsonl(const std::filesystem::path& path, const std::vector<QAPair>& pairs);

}  // namespace newsrag

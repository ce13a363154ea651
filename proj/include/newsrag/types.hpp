#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsrag/time_utc.hpp"

namespace newsrag {

// Languages kept in the corpus; everything else is rejected at validation.
bool is_supported_language(std::string_view lang);
const std::vector<std::string>& supported_languages();

// Provenance record for one broadcast recording.
struct RecordingMetadata {
  std::string recording_id;
  std::string language;  // ISO-639-1, one of {en, es, fr, de, pt}
  std::string source;    // channel name
  double duration_s = 0.0;
  std::optional<std::string> resolution;
  std::optional<std::string> collection;
  UtcMillis start_time = 0;
  UtcMillis end_time = 0;

  bool operator==(const RecordingMetadata&) const = default;
};

struct Document {
  std::string doc_id;
  std::string page_content;
  RecordingMetadata metadata;

  bool operator==(const Document&) const = default;
};

// Half-open [start, end) character offsets into the parent page_content.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const CharSpan&) const = default;
};

struct DocumentChunk {
  std::string chunk_id;  // "{doc_id}#{ordinal}"
  std::string doc_id;
  std::uint32_t ordinal = 0;
  std::string text;  // equals parent page_content at char_span
  CharSpan char_span;
  RecordingMetadata metadata;

  bool operator==(const DocumentChunk&) const = default;
};

std::string make_chunk_id(std::string_view doc_id, std::uint32_t ordinal);
// Inverse of make_chunk_id for doc_ids that contain no '#'.
std::pair<std::string, std::uint32_t> parse_chunk_id(std::string_view chunk_id);

struct EmbeddingVector {
  std::vector<float> values;

  std::size_t dim() const { return values.size(); }
  bool is_zero() const;
  bool all_finite() const;

  bool operator==(const EmbeddingVector&) const = default;
};

// Alpaca-style instruction record with provenance.
struct QAPair {
  std::string instruction;
  std::string input;  // optional context, may be empty
  std::string output;
  std::string language;
  std::optional<std::string> source_recording_id;

  bool operator==(const QAPair&) const = default;
};

struct SearchHit {
  std::string chunk_id;
  double score = 0.0;  // cosine similarity, in [-1, 1]
  std::uint32_t rank = 0;  // 1-based

  bool operator==(const SearchHit&) const = default;
};

struct Answer {
  std::string text;
  std::vector<SearchHit> sources;  // at most 4
  std::string query;
  std::string model_id;
  std::string template_version;

  bool operator==(const Answer&) const = default;
};

// --- validation ---------------------------------------------------------

enum class ViolationCode {
  EmptyId,
  UnsupportedLanguage,
  NegativeDuration,
  EndBeforeStart,
  DurationMismatch,
};

const char* violation_code_name(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

// Empty result means the metadata satisfies every invariant. Violations are
// data, not faults: this never throws.
std::vector<Violation> validate_metadata(const RecordingMetadata& m);

// --- canonical JSON -----------------------------------------------------
// snake_case field names; optionals encode as null; timestamps as ISO-8601.

void to_json(nlohmann::json& j, const RecordingMetadata& m);
void from_json(const nlohmann::json& j, RecordingMetadata& m);
void to_json(nlohmann::json& j, const Document& d);
void from_json(const nlohmann::json& j, Document& d);
void to_json(nlohmann::json& j, const CharSpan& s);
void from_json(const nlohmann::json& j, CharSpan& s);
void to_json(nlohmann::json& j, const DocumentChunk& c);
void from_json(const nlohmann::json& j, DocumentChunk& c);
void to_json(nlohmann::json& j, const EmbeddingVector& v);
void from_json(const nlohmann::json& j, EmbeddingVector& v);
void to_json(nlohmann::json& j, const QAPair& p);
void from_json(const nlohmann::json& j, QAPair& p);
void to_json(nlohmann::json& j, const SearchHit& h);
void from_json(const nlohmann::json& j, SearchHit& h);
void to_json(nlohmann::json& j, const Answer& a);
void from_json(const nlohmann::json& j, Answer& a);

}  // namespace newsrag

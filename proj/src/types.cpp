#include "newsrag/types.hpp"

#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"

namespace newsrag {

using nlohmann::json;

bool is_supported_language(std::string_view lang) {
  return lang == "en" || lang == "es" || lang == "fr" || lang == "de" || lang == "pt";
}

const std::vector<std::string>& supported_languages() {
  static const std::vector<std::string> kLanguages = {"de", "en", "es", "fr", "pt"};
  return kLanguages;
}

std::string make_chunk_id(std::string_view doc_id, std::uint32_t ordinal) {
  return std::string(doc_id) + "#" + std::to_string(ordinal);
}

std::pair<std::string, std::uint32_t> parse_chunk_id(std::string_view chunk_id) {
  const auto pos = chunk_id.rfind('#');
  if (pos == std::string_view::npos || pos == 0 || pos + 1 == chunk_id.size()) {
    throw Error(ErrorCode::InvalidMetadata, "malformed chunk_id: \"" + std::string(chunk_id) + "\"");
  }
  std::uint64_t ordinal = 0;
  for (std::size_t i = pos + 1; i < chunk_id.size(); ++i) {
    const char c = chunk_id[i];
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::InvalidMetadata, "non-numeric chunk ordinal in \"" + std::string(chunk_id) + "\"");
    }
    ordinal = ordinal * 10 + static_cast<std::uint64_t>(c - '0');
    if (ordinal > UINT32_MAX) {
      throw Error(ErrorCode::InvalidMetadata, "chunk ordinal out of range in \"" + std::string(chunk_id) + "\"");
    }
  }
  return {std::string(chunk_id.substr(0, pos)), static_cast<std::uint32_t>(ordinal)};
}

bool EmbeddingVector::is_zero() const {
  for (float v : values) {
    if (v != 0.0f) return false;
  }
  return true;
}

bool EmbeddingVector::all_finite() const {
  for (float v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

const char* violation_code_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::EmptyId: return "EMPTY_ID";
    case ViolationCode::UnsupportedLanguage: return "UNSUPPORTED_LANGUAGE";
    case ViolationCode::NegativeDuration: return "NEGATIVE_DURATION";
    case ViolationCode::EndBeforeStart: return "END_BEFORE_START";
    case ViolationCode::DurationMismatch: return "DURATION_MISMATCH";
  }
  return "UNKNOWN";
}

std::vector<Violation> validate_metadata(const RecordingMetadata& m) {
  std::vector<Violation> violations;
  if (m.recording_id.empty()) {
    violations.push_back({ViolationCode::EmptyId, "recording_id is empty"});
  }
  if (!is_supported_language(m.language)) {
    violations.push_back({ViolationCode::UnsupportedLanguage, "language \"" + m.language + "\" not in {en, es, fr, de, pt}"});
  }
  if (m.duration_s < 0.0) {
    violations.push_back({ViolationCode::NegativeDuration, "duration_s is negative"});
  }
  if (m.end_time < m.start_time) {
    violations.push_back({ViolationCode::EndBeforeStart, "end_time precedes start_time"});
  } else {
    const double span_s = static_cast<double>(m.end_time - m.start_time) / 1000.0;
    if (std::abs(span_s - m.duration_s) > 1.0) {
      violations.push_back({ViolationCode::DurationMismatch,
                            "duration_s deviates more than 1s from end_time - start_time"});
    }
  }
  return violations;
}

// --- JSON codecs ---------------------------------------------------------

namespace {

void put_optional(json& j, const char* key, const std::optional<std::string>& v) {
  if (v.has_value()) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

std::optional<std::string> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

void to_json(json& j, const RecordingMetadata& m) {
  j = json{
      {"recording_id", m.recording_id},
      {"language", m.language},
      {"source", m.source},
      {"duration_s", m.duration_s},
      {"start_time", format_utc(m.start_time)},
      {"end_time", format_utc(m.end_time)},
  };
  put_optional(j, "resolution", m.resolution);
  put_optional(j, "collection", m.collection);
}

void from_json(const json& j, RecordingMetadata& m) {
  j.at("recording_id").get_to(m.recording_id);
  j.at("language").get_to(m.language);
  j.at("source").get_to(m.source);
  j.at("duration_s").get_to(m.duration_s);
  m.start_time = parse_utc(j.at("start_time").get<std::string>());
  m.end_time = parse_utc(j.at("end_time").get<std::string>());
  m.resolution = get_optional(j, "resolution");
  m.collection = get_optional(j, "collection");
}

void to_json(json& j, const Document& d) {
  j = json{{"doc_id", d.doc_id}, {"page_content", d.page_content}, {"metadata", d.metadata}};
}

void from_json(const json& j, Document& d) {
  j.at("doc_id").get_to(d.doc_id);
  j.at("page_content").get_to(d.page_content);
  j.at("metadata").get_to(d.metadata);
}

void to_json(json& j, const CharSpan& s) {
  j = json{{"start", s.start}, {"end", s.end}};
}

void from_json(const json& j, CharSpan& s) {
  j.at("start").get_to(s.start);
  j.at("end").get_to(s.end);
}

void to_json(json& j, const DocumentChunk& c) {
  j = json{
      {"chunk_id", c.chunk_id}, {"doc_id", c.doc_id},       {"ordinal", c.ordinal},
      {"text", c.text},         {"char_span", c.char_span}, {"metadata", c.metadata},
  };
}

void from_json(const json& j, DocumentChunk& c) {
  j.at("chunk_id").get_to(c.chunk_id);
  j.at("doc_id").get_to(c.doc_id);
  j.at("ordinal").get_to(c.ordinal);
  j.at("text").get_to(c.text);
  j.at("char_span").get_to(c.char_span);
  j.at("metadata").get_to(c.metadata);
}

void to_json(json& j, const EmbeddingVector& v) {
  j = json{{"dim", v.dim()}, {"values", v.values}};
}

void from_json(const json& j, EmbeddingVector& v) {
  j.at("values").get_to(v.values);
  if (j.contains("dim") && j.at("dim").get<std::size_t>() != v.values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding dim field disagrees with values length");
  }
}

void to_json(json& j, const QAPair& p) {
  j = json{
      {"instruction", p.instruction},
      {"input", p.input},
      {"output", p.output},
      {"language", p.language},
  };
  put_optional(j, "source_recording_id", p.source_recording_id);
}

void from_json(const json& j, QAPair& p) {
  j.at("instruction").get_to(p.instruction);
  p.input = j.value("input", std::string());
  j.at("output").get_to(p.output);
  p.language = j.value("language", std::string());
  p.source_recording_id = get_optional(j, "source_recording_id");
}

void to_json(json& j, const SearchHit& h) {
  j = json{{"chunk_id", h.chunk_id}, {"score", h.score}, {"rank", h.rank}};
}

void from_json(const json& j, SearchHit& h) {
  j.at("chunk_id").get_to(h.chunk_id);
  j.at("score").get_to(h.score);
  j.at("rank").get_to(h.rank);
}

void to_json(json& j, const Answer& a) {
  j = json{
      {"text", a.text},         {"sources", a.sources},
      {"query", a.query},       {"model_id", a.model_id},
      {"template_version", a.template_version},
  };
}

void from_json(const json& j, Answer& a) {
  j.at("text").get_to(a.text);
  j.at("sources").get_to(a.sources);
  j.at("query").get_to(a.query);
  j.at("model_id").get_to(a.model_id);
  a.template_version = j.value("template_version", std::string());
}

}  // namespace newsrag

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"
#include "newsrag/types.hpp"

using namespace newsrag;
using nlohmann::json;

namespace {

RecordingMetadata sample_metadata() {
  RecordingMetadata m;
  m.recording_id = "2016-01-01_0000_US_CNN_Newsroom";
  m.language = "en";
  m.source = "CNN";
  m.duration_s = 3600.0;
  m.resolution = "720p";
  m.collection = "ucla";
  m.start_time = parse_utc("2016-01-01T00:00:00Z");
  m.end_time = parse_utc("2016-01-01T01:00:00Z");
  return m;
}

bool has_violation(const std::vector<Violation>& violations, ViolationCode code) {
  for (const Violation& v : violations) {
    if (v.code == code) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validate_metadata accepts a zero-duration degenerate recording") {
  RecordingMetadata m = sample_metadata();
  m.end_time = m.start_time;
  m.duration_s = 0.0;
  CHECK(validate_metadata(m).empty());
}

TEST_CASE("validate_metadata flags empty id") {
  RecordingMetadata m = sample_metadata();
  m.recording_id = "";
  CHECK(has_violation(validate_metadata(m), ViolationCode::EmptyId));
}

TEST_CASE("validate_metadata flags unsupported language") {
  RecordingMetadata m = sample_metadata();
  m.language = "it";  // only the five kept languages are valid
  const auto violations = validate_metadata(m);
  CHECK(has_violation(violations, ViolationCode::UnsupportedLanguage));
  CHECK(std::string(violation_code_name(violations.front().code)) == "UNSUPPORTED_LANGUAGE");
}

TEST_CASE("validate_metadata flags time and duration inconsistencies") {
  RecordingMetadata m = sample_metadata();
  m.end_time = m.start_time - 1;
  CHECK(has_violation(validate_metadata(m), ViolationCode::EndBeforeStart));

  m = sample_metadata();
  m.duration_s = 3700.0;  // more than 1s off the timestamp span
  CHECK(has_violation(validate_metadata(m), ViolationCode::DurationMismatch));

  m = sample_metadata();
  m.duration_s = 3600.5;  // within the +/-1s tolerance
  CHECK(validate_metadata(m).empty());

  m = sample_metadata();
  m.duration_s = -5.0;
  CHECK(has_violation(validate_metadata(m), ViolationCode::NegativeDuration));
}

TEST_CASE("every supported language validates") {
  for (const std::string& lang : supported_languages()) {
    RecordingMetadata m = sample_metadata();
    m.language = lang;
    CHECK(validate_metadata(m).empty());
  }
}

TEST_CASE("serialization round-trips field-for-field") {
  const RecordingMetadata m = sample_metadata();
  CHECK(json(m).get<RecordingMetadata>() == m);

  RecordingMetadata no_optionals = m;
  no_optionals.resolution.reset();
  no_optionals.collection.reset();
  CHECK(json(no_optionals).get<RecordingMetadata>() == no_optionals);

  Document doc{"d1", "Good evening.", m};
  CHECK(json(doc).get<Document>() == doc);

  DocumentChunk chunk{"d1#0", "d1", 0, "Good evening.", {0, 13}, m};
  CHECK(json(chunk).get<DocumentChunk>() == chunk);

  EmbeddingVector vec{{0.5f, -1.25f, 3.0f}};
  CHECK(json(vec).get<EmbeddingVector>() == vec);

  QAPair pair{"Who won?", "", "The senator.", "en", "d1"};
  CHECK(json(pair).get<QAPair>() == pair);

  SearchHit hit{"d1#0", 0.974632, 1};
  CHECK(json(hit).get<SearchHit>() == hit);

  Answer answer{"text", {hit}, "Who won?", "stub-model", "news-reporter/v1"};
  CHECK(json(answer).get<Answer>() == answer);
}

TEST_CASE("embedding json rejects dim/values disagreement") {
  const json j = {{"dim", 4}, {"values", {1.0, 2.0}}};
  CHECK_THROWS_AS(j.get<EmbeddingVector>(), Error);
}

TEST_CASE("chunk_id formatting and parsing are inverse") {
  CHECK(make_chunk_id("doc", 7) == "doc#7");
  const auto [doc_id, ordinal] = parse_chunk_id("doc#7");
  CHECK(doc_id == "doc");
  CHECK(ordinal == 7);

  for (std::uint32_t i : {0u, 1u, 41u, 999999u}) {
    const auto [d, o] = parse_chunk_id(make_chunk_id("2016-01-01_CNN", i));
    CHECK(d == "2016-01-01_CNN");
    CHECK(o == i);
  }

  CHECK_THROWS_AS(parse_chunk_id("no-separator"), Error);
  CHECK_THROWS_AS(parse_chunk_id("doc#"), Error);
  CHECK_THROWS_AS(parse_chunk_id("doc#12x"), Error);
}

TEST_CASE("utc timestamps parse and format") {
  CHECK(parse_utc("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_utc("2016-01-01T00:00:00Z") == 1451606400000LL);
  CHECK(parse_utc("2016-01-01T00:00:00.250Z") == 1451606400250LL);
  CHECK(format_utc(1451606400000LL) == "2016-01-01T00:00:00Z");
  CHECK(format_utc(1451606400250LL) == "2016-01-01T00:00:00.250Z");
  CHECK(parse_utc(format_utc(parse_utc("2016-02-29T23:59:59.999Z"))) ==
        parse_utc("2016-02-29T23:59:59.999Z"));

  CHECK_THROWS_AS(parse_utc("2016-01-01 00:00:00"), Error);
  CHECK_THROWS_AS(parse_utc("2016-13-01T00:00:00Z"), Error);
  CHECK_THROWS_AS(parse_utc("2015-02-29T00:00:00Z"), Error);
  CHECK_THROWS_AS(parse_utc("2016-01-01T24:00:00Z"), Error);
}

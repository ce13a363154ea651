#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsrag/types.hpp"

namespace newsrag {

// Transcript file grammar (the single place that knows the raw format):
//   header lines   "KEY: value", one per line, before any caption
//   caption lines  "HH:MM:SS.mmm|HH:MM:SS.mmm|text"
// Required header keys: ID, LAN, SRC, START. Optional: END, DUR, RES, COL.
// Caption timestamps are offsets from the header START time. Blank lines are
// ignored; anything else is MALFORMED_LINE with its 1-based line number.
//
// Caption text cleanup: leading ">>"/">>>" speaker markers, bracketed
// all-caps stage directions like "[APPLAUSE]", and repeated whitespace are
// stripped. Captions are joined with single spaces in timestamp order.
Document parse_transcript(std::string_view raw);

struct ManifestRow {
  std::string language;
  std::size_t channels = 0;
  std::size_t recordings = 0;
  double hours = 0.0;  // summed duration_s / 3600

  bool operator==(const ManifestRow&) const = default;
};

struct IngestFileError {
  std::string file;
  std::size_t line = 0;  // 0 when the error is not line-scoped
  std::string code;
  std::string message;
};

struct IngestReport {
  std::vector<ManifestRow> manifest;  // sorted by language code
  std::size_t documents_written = 0;
  std::vector<IngestFileError> errors;
};

nlohmann::json manifest_to_json(const std::vector<ManifestRow>& manifest);

struct IngestOptions {
  std::optional<std::string> language_filter;
  int concurrency = 4;
};

// Walks root recursively for *.txt transcripts (sorted paths, so repeated
// runs produce identical output), parses each, appends Documents to
// documents_out as JSON Lines and returns the per-language manifest.
// Per-file failures are recorded and skipped; only a bad root throws.
IngestReport ingest_directory(const std::filesystem::path& root,
                              const std::filesystem::path& documents_out,
                              const IngestOptions& options = {});

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path);
void write_documents_jsonl(const std::filesystem::path& path, const std::vector<Document>& docs);

bool validate_utf8(std::string_view bytes);

}  // namespace newsrag

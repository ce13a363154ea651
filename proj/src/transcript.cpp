#include "newsrag/transcript.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"
#include "newsrag/logging.hpp"

namespace newsrag {

using nlohmann::json;

namespace {

struct Caption {
  UtcMillis start_offset = 0;
  UtcMillis end_offset = 0;
  std::string text;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// "HH:MM:SS.mmm" as milliseconds; HH may exceed 23 for long recordings.
std::optional<UtcMillis> parse_caption_time(std::string_view s) {
  if (s.size() != 12 || s[2] != ':' || s[5] != ':' || s[8] != '.') return std::nullopt;
  for (std::size_t i : {0u, 1u, 3u, 4u, 6u, 7u, 9u, 10u, 11u}) {
    if (!is_digit(s[i])) return std::nullopt;
  }
  const int h = (s[0] - '0') * 10 + (s[1] - '0');
  const int m = (s[3] - '0') * 10 + (s[4] - '0');
  const int sec = (s[6] - '0') * 10 + (s[7] - '0');
  const int ms = (s[9] - '0') * 100 + (s[10] - '0') * 10 + (s[11] - '0');
  if (m > 59 || sec > 59) return std::nullopt;
  return ((h * 60 + m) * 60 + sec) * 1000LL + ms;
}

bool looks_like_header(std::string_view line) {
  const auto colon = line.find(": ");
  if (colon == std::string_view::npos || colon == 0) return false;
  for (char c : line.substr(0, colon)) {
    if (!(c >= 'A' && c <= 'Z') && !is_digit(c) && c != '_') return false;
  }
  return true;
}

bool is_stage_direction(std::string_view inner) {
  if (inner.empty()) return true;  // "[]" is noise either way
  for (char c : inner) {
    if (c >= 'a' && c <= 'z') return false;
    if (c == '[' || c == ']') return false;
  }
  return true;
}

// Speaker markers, bracketed all-caps stage directions, whitespace runs.
std::string strip_caption_text(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());

  std::size_t i = 0;
  const auto skip_spaces = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip_spaces();
  while (i + 1 < text.size() && text[i] == '>' && text[i + 1] == '>') {
    i += 2;
    while (i < text.size() && text[i] == '>') ++i;
    skip_spaces();
  }

  bool pending_space = false;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '[') {
      const auto close = text.find(']', i + 1);
      if (close != std::string_view::npos && is_stage_direction(text.substr(i + 1, close - i - 1))) {
        i = close + 1;
        continue;
      }
    }
    if (c == ' ' || c == '\t') {
      pending_space = true;
      ++i;
      continue;
    }
    if (pending_space && !cleaned.empty()) cleaned.push_back(' ');
    pending_space = false;
    cleaned.push_back(c);
    ++i;
  }
  return cleaned;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

bool validate_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    if (b0 < 0x80) {
      len = 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      len = 2;
      if (b0 < 0xc2) return false;  // overlong
    } else if ((b0 & 0xf0) == 0xe0) {
      len = 3;
    } else if ((b0 & 0xf8) == 0xf0) {
      len = 4;
      if (b0 > 0xf4) return false;  // beyond U+10FFFF
    } else {
      return false;
    }
    if (i + len > bytes.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(bytes[i + k]) & 0xc0) != 0x80) return false;
    }
    if (len == 3) {
      const auto b1 = static_cast<unsigned char>(bytes[i + 1]);
      if (b0 == 0xe0 && b1 < 0xa0) return false;               // overlong
      if (b0 == 0xed && b1 >= 0xa0) return false;              // surrogate
    }
    if (len == 4) {
      const auto b1 = static_cast<unsigned char>(bytes[i + 1]);
      if (b0 == 0xf0 && b1 < 0x90) return false;               // overlong
      if (b0 == 0xf4 && b1 >= 0x90) return false;              // beyond U+10FFFF
    }
    i += len;
  }
  return true;
}

Document parse_transcript(std::string_view raw) {
  if (!validate_utf8(raw)) {
    throw ParseError(ErrorCode::InvalidUtf8, 0, "transcript is not valid UTF-8");
  }

  std::map<std::string, std::string> header;
  std::vector<Caption> captions;
  bool seen_caption = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const auto nl = raw.find('\n', pos);
    std::string_view line =
        raw.substr(pos, nl == std::string_view::npos ? raw.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const auto first_bar = line.find('|');
    const auto second_bar =
        first_bar == std::string_view::npos ? std::string_view::npos : line.find('|', first_bar + 1);
    if (second_bar != std::string_view::npos) {
      const auto start = parse_caption_time(line.substr(0, first_bar));
      const auto end = parse_caption_time(line.substr(first_bar + 1, second_bar - first_bar - 1));
      if (start && end) {
        if (*end < *start) {
          throw ParseError(ErrorCode::MalformedLine, line_no, "caption ends before it starts");
        }
        captions.push_back({*start, *end, strip_caption_text(line.substr(second_bar + 1))});
        seen_caption = true;
        continue;
      }
    }
    if (looks_like_header(line)) {
      if (seen_caption) {
        throw ParseError(ErrorCode::MalformedLine, line_no, "header line after captions");
      }
      const auto colon = line.find(": ");
      header[std::string(line.substr(0, colon))] = trim(line.substr(colon + 2));
      continue;
    }
    throw ParseError(ErrorCode::MalformedLine, line_no,
                     "line matches neither header nor caption grammar");
  }

  for (const char* key : {"ID", "LAN", "SRC", "START"}) {
    if (!header.contains(key) || header.at(key).empty()) {
      throw Error(ErrorCode::MissingHeaderField, std::string("header field ") + key);
    }
  }

  // Timestamp order only; line order in the file is irrelevant. Ties sort by
  // text so identical-timestamp captions are still deterministic.
  std::sort(captions.begin(), captions.end(), [](const Caption& a, const Caption& b) {
    if (a.start_offset != b.start_offset) return a.start_offset < b.start_offset;
    if (a.end_offset != b.end_offset) return a.end_offset < b.end_offset;
    return a.text < b.text;
  });

  std::string page_content;
  UtcMillis last_end_offset = 0;
  for (const Caption& c : captions) {
    last_end_offset = std::max(last_end_offset, c.end_offset);
    if (c.text.empty()) continue;
    if (!page_content.empty()) page_content.push_back(' ');
    page_content.append(c.text);
  }
  if (page_content.empty()) {
    throw Error(ErrorCode::EmptyTranscript, "no caption text survives stripping");
  }

  Document doc;
  doc.metadata.recording_id = header.at("ID");
  doc.metadata.language = header.at("LAN");
  doc.metadata.source = header.at("SRC");
  doc.metadata.start_time = parse_utc(header.at("START"));
  doc.metadata.end_time = header.contains("END") ? parse_utc(header.at("END"))
                                                 : doc.metadata.start_time + last_end_offset;
  if (header.contains("DUR")) {
    try {
      doc.metadata.duration_s = std::stod(header.at("DUR"));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidMetadata, "DUR is not a number");
    }
  } else {
    doc.metadata.duration_s =
        static_cast<double>(doc.metadata.end_time - doc.metadata.start_time) / 1000.0;
  }
  if (header.contains("RES")) doc.metadata.resolution = header.at("RES");
  if (header.contains("COL")) doc.metadata.collection = header.at("COL");
  doc.doc_id = doc.metadata.recording_id;
  doc.page_content = std::move(page_content);

  const std::vector<Violation> violations = validate_metadata(doc.metadata);
  if (!violations.empty()) {
    std::string detail;
    for (const Violation& v : violations) {
      if (!detail.empty()) detail += ", ";
      detail += violation_code_name(v.code);
    }
    throw Error(ErrorCode::InvalidMetadata, detail);
  }
  return doc;
}

json manifest_to_json(const std::vector<ManifestRow>& manifest) {
  json rows = json::array();
  for (const ManifestRow& r : manifest) {
    rows.push_back({{"language", r.language},
                    {"channels", r.channels},
                    {"recordings", r.recordings},
                    {"hours", r.hours}});
  }
  return json{{"columns", {"language", "channels", "recordings", "hours"}}, {"rows", rows}};
}

IngestReport ingest_directory(const std::filesystem::path& root,
                              const std::filesystem::path& documents_out,
                              const IngestOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw Error(ErrorCode::IoError, "ingest root " + root.string() + " is not a directory");
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  struct Slot {
    std::optional<Document> doc;
    std::optional<IngestFileError> error;
  };
  std::vector<Slot> slots(files.size());

  // Parsing is embarrassingly parallel; each worker owns disjoint slots.
  const int workers =
      std::max(1, std::min<int>(options.concurrency, static_cast<int>(files.size())));
  std::atomic<std::size_t> next{0};
  const auto parse_one = [&](std::size_t i) {
    std::ifstream in(files[i], std::ios::binary);
    if (!in) {
      slots[i].error = IngestFileError{files[i].string(), 0, "IO_ERROR", "cannot open file"};
      return;
    }
    const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      slots[i].doc = parse_transcript(raw);
    } catch (const ParseError& e) {
      slots[i].error =
          IngestFileError{files[i].string(), e.line_no(), error_code_name(e.code()), e.what()};
    } catch (const Error& e) {
      slots[i].error = IngestFileError{files[i].string(), 0, error_code_name(e.code()), e.what()};
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) parse_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
          parse_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::ofstream out(documents_out, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot open " + documents_out.string() + " for writing");
  }

  IngestReport report;
  struct LangStats {
    std::set<std::string> channels;
    std::size_t recordings = 0;
    double hours = 0.0;
  };
  std::map<std::string, LangStats> stats;
  std::set<std::string> seen_ids;

  for (std::size_t i = 0; i < files.size(); ++i) {
    if (slots[i].error) {
      report.errors.push_back(*slots[i].error);
      continue;
    }
    const Document& doc = *slots[i].doc;
    if (options.language_filter && doc.metadata.language != *options.language_filter) continue;
    if (!seen_ids.insert(doc.metadata.recording_id).second) {
      report.errors.push_back(IngestFileError{files[i].string(), 0, "DUPLICATE_ID",
                                              "recording_id \"" + doc.metadata.recording_id +
                                                  "\" already ingested"});
      continue;
    }
    out << json(doc).dump() << '\n';
    ++report.documents_written;
    LangStats& s = stats[doc.metadata.language];
    s.channels.insert(doc.metadata.source);
    s.recordings += 1;
    s.hours += doc.metadata.duration_s / 3600.0;
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + documents_out.string());

  for (const auto& [language, s] : stats) {
    report.manifest.push_back(ManifestRow{language, s.channels.size(), s.recordings, s.hours});
  }
  log_info("ingest complete", {{"files", std::to_string(files.size())},
                               {"documents", std::to_string(report.documents_written)},
                               {"errors", std::to_string(report.errors.size())}});
  return report;
}

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      docs.push_back(json::parse(line).get<Document>());
    } catch (const json::exception& e) {
      throw ParseError(ErrorCode::MalformedLine, line_no, e.what());
    }
  }
  return docs;
}

void write_documents_jsonl(const std::filesystem::path& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (const Document& d : docs) out << json(d).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace newsrag

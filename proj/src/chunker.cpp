#include "newsrag/chunker.hpp"

#include <algorithm>

#include "newsrag/error.hpp"

namespace newsrag {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

// Cut position within (start, limit], or 0 when the rule does not apply.
// A sentence cut sits after the terminal punctuation plus any whitespace run
// following it, so the next chunk starts at a sentence start.
std::size_t sentence_cut(const std::string& text, std::size_t start, std::size_t limit) {
  std::size_t best = 0;
  for (std::size_t p = start + 1; p <= limit; ++p) {
    if (!is_sentence_end(text[p - 1])) continue;
    if (p < text.size() && !is_space(text[p])) continue;
    std::size_t cut = p;
    while (cut < limit && is_space(text[cut])) ++cut;
    best = cut;
  }
  return best;
}

std::size_t whitespace_cut(const std::string& text, std::size_t start, std::size_t limit) {
  for (std::size_t p = limit; p > start; --p) {
    if (is_space(text[p - 1])) return p;
  }
  return 0;
}

}  // namespace

std::vector<DocumentChunk> split_document(const Document& doc, const ChunkPolicy& policy) {
  if (policy.max_chars == 0 || policy.overlap_chars >= policy.max_chars) {
    throw Error(ErrorCode::InvalidPolicy, "requires 0 <= overlap_chars < max_chars, max_chars > 0");
  }
  const std::string& content = doc.page_content;
  if (content.empty()) {
    throw Error(ErrorCode::EmptyInput, "document has no page_content to chunk");
  }

  std::vector<DocumentChunk> chunks;
  std::size_t start = 0;
  while (start < content.size()) {
    const std::size_t limit = std::min(content.size(), start + policy.max_chars);
    std::size_t cut = limit;
    bool at_sentence = false;

    if (limit < content.size()) {
      if (const std::size_t c = sentence_cut(content, start, limit)) {
        cut = c;
        at_sentence = true;
      } else if (const std::size_t c2 = whitespace_cut(content, start, limit)) {
        cut = c2;
      }
    }

    DocumentChunk chunk;
    chunk.doc_id = doc.doc_id;
    chunk.ordinal = static_cast<std::uint32_t>(chunks.size());
    chunk.chunk_id = make_chunk_id(doc.doc_id, chunk.ordinal);
    chunk.char_span = {start, cut};
    chunk.text = content.substr(start, cut - start);
    chunk.metadata = doc.metadata;
    chunks.push_back(std::move(chunk));

    if (cut >= content.size()) break;
    if (at_sentence) {
      start = cut;
    } else {
      const std::size_t overlap = std::min(policy.overlap_chars, cut - start - 1);
      start = cut - overlap;
    }
  }
  return chunks;
}

std::string reassemble_chunks(const std::vector<DocumentChunk>& chunks) {
  std::string out;
  std::size_t covered = 0;
  for (const DocumentChunk& c : chunks) {
    if (c.char_span.start > covered) {
      throw Error(ErrorCode::InvalidMetadata, "gap before chunk " + c.chunk_id);
    }
    const std::size_t skip = covered - c.char_span.start;
    if (skip < c.text.size()) {
      out.append(c.text, skip, c.text.size() - skip);
      covered = c.char_span.end;
    }
  }
  return out;
}

}  // namespace newsrag

#pragma once

#include <cstddef>
#include <vector>

#include "newsrag/types.hpp"

namespace newsrag {

// Character-based chunking policy. Boundary preference when a document does
// not fit in one chunk: sentence end, then whitespace, then hard cut.
struct ChunkPolicy {
  std::size_t max_chars = 1000;
  std::size_t overlap_chars = 200;

  bool operator==(const ChunkPolicy&) const = default;
};

// Splits a document into ordered chunks that tile page_content: spans cover
// [0, len) with no gaps, pairwise overlaps at most overlap_chars, every chunk
// at most max_chars long. A chunk cut at a sentence boundary is followed with
// no overlap; whitespace and hard cuts are followed with overlap_chars of
// shared text (clamped so the split always makes progress).
//
// Throws Error(InvalidPolicy) when overlap_chars >= max_chars or max_chars is
// zero, Error(EmptyInput) when page_content is empty.
std::vector<DocumentChunk> split_document(const Document& doc, const ChunkPolicy& policy);

// Rebuilds page_content from chunks by dropping each chunk's overlap with its
// predecessor. Used by tests and import tooling to check chunk integrity.
std::string reassemble_chunks(const std::vector<DocumentChunk>& chunks);

}  // namespace newsrag

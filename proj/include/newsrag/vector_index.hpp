#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "newsrag/types.hpp"

namespace newsrag {

struct IndexedChunk {
  DocumentChunk chunk;
  EmbeddingVector vector;
};

struct SearchFilter {
  std::optional<std::string> language;
  std::optional<std::string> source;
  // Recording intervals intersecting [start, end] pass the filter.
  std::optional<std::pair<UtcMillis, UtcMillis>> time_range;

  bool is_empty() const { return !language && !source && !time_range; }
  bool matches(const RecordingMetadata& m) const;
};

// S = (a . b) / (|a| |b|). Throws on dim mismatch, zero or non-finite input.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct UpsertStats {
  std::size_t inserted = 0;
  std::size_t replaced = 0;
};

// Exact brute-force cosine index over contiguous float storage. chunk_id is
// the key; search is deterministic with ties broken by ascending chunk_id.
// Concurrency: many readers or one writer.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dim);

  VectorIndex(VectorIndex&& other) noexcept;
  VectorIndex& operator=(VectorIndex&& other) noexcept;
  VectorIndex(const VectorIndex&) = delete;
  VectorIndex& operator=(const VectorIndex&) = delete;

  std::size_t dim() const { return dim_; }
  std::size_t size() const;

  // Validates the whole batch before touching storage: a bad item rejects
  // the call and leaves the index unchanged.
  UpsertStats upsert(const std::vector<IndexedChunk>& items);

  // Top-k by cosine similarity among chunks passing the filter, sorted by
  // score descending then chunk_id ascending; ranks contiguous from 1.
  std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k = 4,
                                const SearchFilter& filter = {}) const;

  std::optional<DocumentChunk> find_chunk(const std::string& chunk_id) const;
  std::optional<EmbeddingVector> find_vector(const std::string& chunk_id) const;
  std::vector<std::string> chunk_ids() const;

  // Binary snapshot: magic "NRVI", version, dim, count, one record per chunk
  // (canonical JSON payload + little-endian f32 vector), trailing FNV-1a 64
  // checksum. Bit-exact across save/load.
  void save_snapshot(const std::filesystem::path& path) const;
  static VectorIndex load_snapshot(const std::filesystem::path& path);

  // Interop format: one {"chunk": {...}, "vector": [...]} object per line.
  void export_jsonl(const std::filesystem::path& path) const;
  static VectorIndex import_jsonl(const std::filesystem::path& path);

 private:
  void validate_vector(const EmbeddingVector& v) const;
  UpsertStats upsert_unlocked(const std::vector<IndexedChunk>& items);

  std::size_t dim_;
  std::vector<float> flat_;      // size() * dim_, row per chunk
  std::vector<double> norms_;    // cached |v| per row
  std::vector<DocumentChunk> chunks_;
  std::unordered_map<std::string, std::size_t> slot_by_id_;
  mutable std::shared_mutex mutex_;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace newsrag

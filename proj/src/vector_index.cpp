#include "newsrag/vector_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"

namespace newsrag {

using nlohmann::json;

namespace {

// Single dot-product kernel shared by cosine_similarity and search so both
// paths produce bit-identical scores. Four accumulators keep the loop
// vectorizable without changing the summation order between calls.
double dot_f32(const float* a, const float* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  for (; i < n; ++i) {
    s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return (s0 + s1) + (s2 + s3);
}

double norm_f32(const float* v, std::size_t n) { return std::sqrt(dot_f32(v, v, n)); }

void check_query_vector(const EmbeddingVector& v, std::size_t expected_dim) {
  if (v.dim() != expected_dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(expected_dim) + ", got " + std::to_string(v.dim()));
  }
  if (!v.all_finite()) {
    throw Error(ErrorCode::NonFiniteVector, "vector contains non-finite values");
  }
  if (v.is_zero()) {
    throw Error(ErrorCode::ZeroVector, "cosine similarity is undefined for the zero vector");
  }
}

void append_le32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i) & 0xff));
}

void append_le64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i) & 0xff));
}

std::uint32_t read_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint64_t read_le64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = v << 8 | p[i];
  return v;
}

std::uint64_t checksum_fnv1a64(const char* data, std::size_t n) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

[[noreturn]] void corrupt(const std::string& reason) {
  throw Error(ErrorCode::CorruptSnapshot, reason);
}

}  // namespace

bool SearchFilter::matches(const RecordingMetadata& m) const {
  if (language && m.language != *language) return false;
  if (source && m.source != *source) return false;
  if (time_range) {
    const auto& [begin, end] = *time_range;
    if (m.start_time > end || m.end_time < begin) return false;
  }
  return true;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  check_query_vector(a, a.dim());
  check_query_vector(b, a.dim());
  const double dot = dot_f32(a.values.data(), b.values.data(), a.dim());
  return dot / (norm_f32(a.values.data(), a.dim()) * norm_f32(b.values.data(), b.dim()));
}

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidConfig, "index dimension must be positive");
}

VectorIndex::VectorIndex(VectorIndex&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  dim_ = other.dim_;
  flat_ = std::move(other.flat_);
  norms_ = std::move(other.norms_);
  chunks_ = std::move(other.chunks_);
  slot_by_id_ = std::move(other.slot_by_id_);
}

VectorIndex& VectorIndex::operator=(VectorIndex&& other) noexcept {
  if (this != &other) {
    std::unique_lock lhs(mutex_, std::defer_lock);
    std::unique_lock rhs(other.mutex_, std::defer_lock);
    std::lock(lhs, rhs);
    dim_ = other.dim_;
    flat_ = std::move(other.flat_);
    norms_ = std::move(other.norms_);
    chunks_ = std::move(other.chunks_);
    slot_by_id_ = std::move(other.slot_by_id_);
  }
  return *this;
}

std::size_t VectorIndex::size() const {
  std::shared_lock lock(mutex_);
  return chunks_.size();
}

void VectorIndex::validate_vector(const EmbeddingVector& v) const {
  if (v.dim() != dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(dim_) + ", got " + std::to_string(v.dim()));
  }
  if (!v.all_finite()) {
    throw Error(ErrorCode::NonFiniteVector, "vector contains non-finite values");
  }
  if (v.is_zero()) {
    throw Error(ErrorCode::ZeroVector, "all-zero vectors cannot be indexed");
  }
}

UpsertStats VectorIndex::upsert_unlocked(const std::vector<IndexedChunk>& items) {
  for (const IndexedChunk& item : items) {
    if (item.chunk.chunk_id.empty()) {
      throw Error(ErrorCode::InvalidMetadata, "chunk with empty chunk_id");
    }
    validate_vector(item.vector);
  }

  UpsertStats stats;
  for (const IndexedChunk& item : items) {
    const auto it = slot_by_id_.find(item.chunk.chunk_id);
    if (it == slot_by_id_.end()) {
      const std::size_t slot = chunks_.size();
      chunks_.push_back(item.chunk);
      flat_.insert(flat_.end(), item.vector.values.begin(), item.vector.values.end());
      norms_.push_back(norm_f32(item.vector.values.data(), dim_));
      slot_by_id_.emplace(item.chunk.chunk_id, slot);
      ++stats.inserted;
    } else {
      const std::size_t slot = it->second;
      chunks_[slot] = item.chunk;
      std::copy(item.vector.values.begin(), item.vector.values.end(),
                flat_.begin() + static_cast<std::ptrdiff_t>(slot * dim_));
      norms_[slot] = norm_f32(item.vector.values.data(), dim_);
      ++stats.replaced;
    }
  }
  return stats;
}

UpsertStats VectorIndex::upsert(const std::vector<IndexedChunk>& items) {
  std::unique_lock lock(mutex_);
  return upsert_unlocked(items);
}

std::vector<SearchHit> VectorIndex::search(const EmbeddingVector& query, std::size_t k,
                                           const SearchFilter& filter) const {
  if (k == 0) throw Error(ErrorCode::InvalidConfig, "k must be positive");
  check_query_vector(query, dim_);

  std::shared_lock lock(mutex_);

  const double query_norm = norm_f32(query.values.data(), dim_);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(chunks_.size());
  for (std::size_t slot = 0; slot < chunks_.size(); ++slot) {
    if (!filter.is_empty() && !filter.matches(chunks_[slot].metadata)) continue;
    const double dot = dot_f32(query.values.data(), flat_.data() + slot * dim_, dim_);
    scored.emplace_back(dot / (query_norm * norms_[slot]), slot);
  }

  const auto better = [this](const std::pair<double, std::size_t>& a,
                             const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return chunks_[a.second].chunk_id < chunks_[b.second].chunk_id;
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), better);

  std::vector<SearchHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    hits.push_back(SearchHit{chunks_[scored[i].second].chunk_id, scored[i].first,
                             static_cast<std::uint32_t>(i + 1)});
  }
  return hits;
}

std::optional<DocumentChunk> VectorIndex::find_chunk(const std::string& chunk_id) const {
  std::shared_lock lock(mutex_);
  const auto it = slot_by_id_.find(chunk_id);
  if (it == slot_by_id_.end()) return std::nullopt;
  return chunks_[it->second];
}

std::optional<EmbeddingVector> VectorIndex::find_vector(const std::string& chunk_id) const {
  std::shared_lock lock(mutex_);
  const auto it = slot_by_id_.find(chunk_id);
  if (it == slot_by_id_.end()) return std::nullopt;
  const float* row = flat_.data() + it->second * dim_;
  return EmbeddingVector{std::vector<float>(row, row + dim_)};
}

std::vector<std::string> VectorIndex::chunk_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  ids.reserve(chunks_.size());
  for (const DocumentChunk& c : chunks_) ids.push_back(c.chunk_id);
  return ids;
}

void VectorIndex::save_snapshot(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);

  std::string buffer;
  buffer.append("NRVI");
  append_le32(buffer, kSnapshotVersion);
  append_le32(buffer, static_cast<std::uint32_t>(dim_));
  append_le64(buffer, chunks_.size());
  for (std::size_t slot = 0; slot < chunks_.size(); ++slot) {
    const std::string payload = json(chunks_[slot]).dump();
    append_le32(buffer, static_cast<std::uint32_t>(payload.size()));
    buffer.append(payload);
    const float* row = flat_.data() + slot * dim_;
    for (std::size_t i = 0; i < dim_; ++i) {
      append_le32(buffer, std::bit_cast<std::uint32_t>(row[i]));
    }
  }
  append_le64(buffer, checksum_fnv1a64(buffer.data(), buffer.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing snapshot to " + path.string());
}

VectorIndex VectorIndex::load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string buffer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t kHeader = 4 + 4 + 4 + 8;
  if (buffer.size() < kHeader + 8) corrupt("file shorter than header");
  const auto* bytes = reinterpret_cast<const unsigned char*>(buffer.data());
  if (buffer.compare(0, 4, "NRVI") != 0) corrupt("bad magic");
  const std::uint32_t version = read_le32(bytes + 4);
  if (version != kSnapshotVersion) {
    throw Error(ErrorCode::VersionUnsupported, "snapshot version " + std::to_string(version));
  }
  const std::size_t body = buffer.size() - 8;
  const std::uint64_t stored = read_le64(bytes + body);
  if (checksum_fnv1a64(buffer.data(), body) != stored) corrupt("checksum mismatch");

  const std::size_t dim = read_le32(bytes + 8);
  const std::uint64_t count = read_le64(bytes + 12);
  if (dim == 0) corrupt("zero dimension");

  VectorIndex index(dim);
  std::vector<IndexedChunk> items;
  items.reserve(count);
  std::size_t off = kHeader;
  for (std::uint64_t r = 0; r < count; ++r) {
    if (off + 4 > body) corrupt("truncated record header");
    const std::uint32_t payload_len = read_le32(bytes + off);
    off += 4;
    if (off + payload_len + dim * 4 > body) corrupt("truncated record");

    IndexedChunk item;
    try {
      json::parse(buffer.begin() + static_cast<std::ptrdiff_t>(off),
                  buffer.begin() + static_cast<std::ptrdiff_t>(off + payload_len))
          .get_to(item.chunk);
    } catch (const json::exception& e) {
      corrupt(std::string("bad chunk payload: ") + e.what());
    }
    off += payload_len;

    item.vector.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      item.vector.values[i] = std::bit_cast<float>(read_le32(bytes + off + i * 4));
    }
    off += dim * 4;
    items.push_back(std::move(item));
  }
  if (off != body) corrupt("trailing bytes after records");

  try {
    const UpsertStats stats = index.upsert_unlocked(items);
    if (stats.replaced != 0) corrupt("duplicate chunk_id in snapshot");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptSnapshot) throw;
    corrupt(std::string("invalid record: ") + e.what());
  }
  return index;
}

void VectorIndex::export_jsonl(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (std::size_t slot = 0; slot < chunks_.size(); ++slot) {
    const float* row = flat_.data() + slot * dim_;
    const json line = {
        {"chunk", chunks_[slot]},
        {"vector", std::vector<float>(row, row + dim_)},
    };
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

VectorIndex VectorIndex::import_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  std::vector<IndexedChunk> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json parsed = json::parse(line);
      IndexedChunk item;
      parsed.at("chunk").get_to(item.chunk);
      item.vector.values = parsed.at("vector").get<std::vector<float>>();
      items.push_back(std::move(item));
    } catch (const json::exception& e) {
      corrupt("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (items.empty()) corrupt("no records in " + path.string());

  VectorIndex index(items.front().vector.dim());
  index.upsert(items);
  return index;
}

}  // namespace newsrag

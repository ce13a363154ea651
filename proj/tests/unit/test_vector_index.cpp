#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "../support/oracles.hpp"
#include "newsrag/error.hpp"
#include "newsrag/vector_index.hpp"

using namespace newsrag;
using namespace newsrag::testing;
namespace fs = std::filesystem;

namespace {

EmbeddingVector vec(std::initializer_list<float> values) { return EmbeddingVector{values}; }

IndexedChunk item_with(std::string chunk_id, EmbeddingVector v, std::string language = "en") {
  IndexedChunk item;
  const auto [doc_id, ordinal] = parse_chunk_id(chunk_id);
  item.chunk.chunk_id = std::move(chunk_id);
  item.chunk.doc_id = doc_id;
  item.chunk.ordinal = ordinal;
  item.chunk.text = "text of " + item.chunk.chunk_id;
  item.chunk.char_span = {0, item.chunk.text.size()};
  item.chunk.metadata = synthetic_metadata(ordinal);
  item.chunk.metadata.language = std::move(language);
  item.vector = std::move(v);
  return item;
}

fs::path temp_file(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("newsrag_index_" + name);
  fs::remove(p);
  return p;
}

}  // namespace

TEST_CASE("cosine identity, orthogonality and the hand value") {
  CHECK(cosine_similarity(vec({3.f, -4.f}), vec({3.f, -4.f})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(vec({1.f, 0.f}), vec({0.f, 1.f})) == doctest::Approx(0.0));
  // 32 / (sqrt(14) * sqrt(77))
  CHECK(cosine_similarity(vec({1.f, 2.f, 3.f}), vec({4.f, 5.f, 6.f})) ==
        doctest::Approx(0.974631846).epsilon(1e-6));
}

TEST_CASE("cosine is symmetric and bounded") {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_query(16, rng);
    const auto b = random_query(16, rng);
    const double ab = cosine_similarity(a, b);
    CHECK(ab == cosine_similarity(b, a));
    CHECK(std::abs(ab) <= 1.0 + 1e-9);
  }
}

TEST_CASE("cosine input validation") {
  CHECK_THROWS_AS(cosine_similarity(vec({1.f, 2.f}), vec({1.f, 2.f, 3.f})), Error);
  try {
    cosine_similarity(vec({0.f, 0.f}), vec({1.f, 2.f}));
    FAIL("expected ZERO_VECTOR");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVector);
  }
  CHECK_THROWS_AS(
      cosine_similarity(vec({std::numeric_limits<float>::quiet_NaN(), 1.f}), vec({1.f, 1.f})),
      Error);
}

TEST_CASE("upsert inserts then replaces by chunk_id") {
  VectorIndex index(2);
  const auto first = index.upsert({item_with("d#0", vec({1.f, 0.f}))});
  CHECK(first.inserted == 1);
  CHECK(first.replaced == 0);
  const auto second = index.upsert({item_with("d#0", vec({0.f, 1.f}))});
  CHECK(second.inserted == 0);
  CHECK(second.replaced == 1);
  CHECK(index.size() == 1);
  // replacement really took: the new vector wins the search
  const auto hits = index.search(vec({0.f, 1.f}), 1);
  CHECK(hits[0].score == doctest::Approx(1.0));
}

TEST_CASE("a bad item rejects the whole upsert batch") {
  VectorIndex index(2);
  index.upsert({item_with("d#0", vec({1.f, 0.f}))});
  std::vector<IndexedChunk> batch = {
      item_with("d#1", vec({0.f, 1.f})),
      item_with("d#2", vec({1.f, 2.f, 3.f})),  // wrong dim
  };
  CHECK_THROWS_AS(index.upsert(batch), Error);
  CHECK(index.size() == 1);  // unchanged

  batch[1] = item_with("d#2", vec({0.f, 0.f}));  // zero vector
  CHECK_THROWS_AS(index.upsert(batch), Error);
  CHECK(index.size() == 1);
}

TEST_CASE("search returns fewer hits only when fewer chunks pass") {
  VectorIndex index(2);
  index.upsert({item_with("d#0", vec({1.f, 0.f}))});
  const auto hits = index.search(vec({1.f, 1.f}), 4);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].rank == 1);
  CHECK(hits[0].chunk_id == "d#0");
}

TEST_CASE("search matches the brute-force oracle on 10k chunks") {
  std::mt19937 rng(20160102);
  // Vector pool smaller than the corpus so score ties are common.
  const auto corpus = synthetic_corpus(10000, 32, rng, 2500);
  VectorIndex index(32);
  index.upsert(corpus);
  CHECK(index.size() == 10000);

  for (int q = 0; q < 20; ++q) {
    const EmbeddingVector query = random_query(32, rng);
    for (std::size_t k : {1u, 4u, 10u}) {
      const auto expected = brute_force_search(corpus, query, k);
      const auto got = index.search(query, k);
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].chunk_id == expected[i].chunk_id);
        CHECK(got[i].score == expected[i].score);  // bit-equal
        CHECK(got[i].rank == expected[i].rank);
      }
    }
  }
}

TEST_CASE("scale invariance of ranking and scores") {
  std::mt19937 rng(5);
  const auto corpus = synthetic_corpus(500, 16, rng);
  VectorIndex index(16);
  index.upsert(corpus);

  const EmbeddingVector query = random_query(16, rng);
  EmbeddingVector scaled = query;
  for (float& x : scaled.values) x *= 7.5f;

  const auto base = index.search(query, 10);
  const auto after = index.search(scaled, 10);
  REQUIRE(base.size() == after.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].chunk_id == after[i].chunk_id);
    CHECK(base[i].score == doctest::Approx(after[i].score).epsilon(1e-12));
  }
}

TEST_CASE("top-k is a prefix of top-(k+1)") {
  std::mt19937 rng(6);
  const auto corpus = synthetic_corpus(300, 8, rng, 80);
  VectorIndex index(8);
  index.upsert(corpus);
  const EmbeddingVector query = random_query(8, rng);
  for (std::size_t k = 1; k < 12; ++k) {
    const auto small = index.search(query, k);
    const auto large = index.search(query, k + 1);
    REQUIRE(large.size() >= small.size());
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(small[i].chunk_id == large[i].chunk_id);
    }
  }
}

TEST_CASE("filters are sound and complete") {
  std::mt19937 rng(8);
  const auto corpus = synthetic_corpus(2000, 16, rng, 700);
  VectorIndex index(16);
  index.upsert(corpus);

  SearchFilter filter;
  filter.language = "en";
  filter.source = "CNN";

  const EmbeddingVector query = random_query(16, rng);
  const auto hits = index.search(query, 10, filter);
  CHECK(!hits.empty());
  for (const SearchHit& hit : hits) {
    const auto chunk = index.find_chunk(hit.chunk_id);
    REQUIRE(chunk.has_value());
    CHECK(chunk->metadata.language == "en");
    CHECK(chunk->metadata.source == "CNN");
  }
  // completeness: identical to oracle restricted to the filter
  const auto expected = brute_force_search(corpus, query, 10, filter);
  REQUIRE(hits.size() == expected.size());
  for (std::size_t i = 0; i < hits.size(); ++i) {
    CHECK(hits[i].chunk_id == expected[i].chunk_id);
    CHECK(hits[i].score == expected[i].score);
  }
}

TEST_CASE("time-range filter keeps only intersecting recordings") {
  std::mt19937 rng(9);
  const auto corpus = synthetic_corpus(200, 8, rng);
  VectorIndex index(8);
  index.upsert(corpus);

  SearchFilter filter;
  const UtcMillis begin = 1451606400000LL + 50LL * 3600000;
  filter.time_range = {{begin, begin + 10LL * 3600000}};

  const auto hits = index.search(random_query(8, rng), 50, filter);
  CHECK(!hits.empty());
  for (const SearchHit& hit : hits) {
    const auto chunk = index.find_chunk(hit.chunk_id);
    CHECK(chunk->metadata.start_time <= filter.time_range->second);
    CHECK(chunk->metadata.end_time >= filter.time_range->first);
  }
}

TEST_CASE("snapshot round-trip is bit-exact") {
  std::mt19937 rng(10);
  const auto corpus = synthetic_corpus(1000, 24, rng, 400);
  VectorIndex index(24);
  index.upsert(corpus);

  const fs::path path = temp_file("roundtrip.nrvi");
  index.save_snapshot(path);
  const VectorIndex loaded = VectorIndex::load_snapshot(path);
  CHECK(loaded.size() == index.size());
  CHECK(loaded.dim() == index.dim());

  for (int q = 0; q < 20; ++q) {
    const EmbeddingVector query = random_query(24, rng);
    const auto before = index.search(query, 10);
    const auto after = loaded.search(query, 10);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(before[i].chunk_id == after[i].chunk_id);
      CHECK(before[i].score == after[i].score);  // bit-equal
    }
  }
  // payloads survive too
  const auto chunk = loaded.find_chunk(corpus.front().chunk.chunk_id);
  REQUIRE(chunk.has_value());
  CHECK(*chunk == corpus.front().chunk);
  fs::remove(path);
}

TEST_CASE("empty index round-trips") {
  const VectorIndex index(16);
  const fs::path path = temp_file("empty.nrvi");
  index.save_snapshot(path);
  const VectorIndex loaded = VectorIndex::load_snapshot(path);
  CHECK(loaded.size() == 0);
  CHECK(loaded.dim() == 16);
  fs::remove(path);
}

TEST_CASE("truncated and tampered snapshots are rejected") {
  std::mt19937 rng(12);
  const auto corpus = synthetic_corpus(20, 8, rng);
  VectorIndex index(8);
  index.upsert(corpus);
  const fs::path path = temp_file("corrupt.nrvi");
  index.save_snapshot(path);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }

  SUBCASE("truncated") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    try {
      VectorIndex::load_snapshot(path);
      FAIL("expected CORRUPT_SNAPSHOT");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptSnapshot);
    }
  }

  SUBCASE("flipped byte") {
    bytes[bytes.size() / 2] ^= 0x5a;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    try {
      VectorIndex::load_snapshot(path);
      FAIL("expected CORRUPT_SNAPSHOT");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptSnapshot);
    }
  }

  SUBCASE("unsupported version") {
    bytes[4] = 99;  // version field
    // checksum must stay valid so the version check is what fires
    std::string body = bytes.substr(0, bytes.size() - 8);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : body) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    for (int i = 0; i < 8; ++i) body.push_back(static_cast<char>(h >> (8 * i) & 0xff));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.close();
    try {
      VectorIndex::load_snapshot(path);
      FAIL("expected VERSION_UNSUPPORTED");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::VersionUnsupported);
    }
  }
  fs::remove(path);
}

TEST_CASE("jsonl export/import preserves search results") {
  std::mt19937 rng(13);
  const auto corpus = synthetic_corpus(200, 12, rng, 60);
  VectorIndex index(12);
  index.upsert(corpus);

  const fs::path path = temp_file("export.jsonl");
  index.export_jsonl(path);
  const VectorIndex imported = VectorIndex::import_jsonl(path);
  CHECK(imported.size() == index.size());

  const EmbeddingVector query = random_query(12, rng);
  const auto before = index.search(query, 8);
  const auto after = imported.search(query, 8);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].chunk_id == after[i].chunk_id);
    CHECK(before[i].score == after[i].score);
  }
  fs::remove(path);
}

TEST_CASE("search query validation") {
  VectorIndex index(4);
  index.upsert({item_with("d#0", vec({1.f, 0.f, 0.f, 0.f}))});
  CHECK_THROWS_AS(index.search(vec({1.f, 0.f}), 4), Error);
  CHECK_THROWS_AS(index.search(vec({0.f, 0.f, 0.f, 0.f}), 4), Error);
  CHECK_THROWS_AS(index.search(vec({1.f, 0.f, 0.f, 0.f}), 0), Error);
}

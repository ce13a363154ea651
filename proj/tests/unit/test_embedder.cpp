#include <doctest.h>

#include <cmath>

#include "../support/stub_server.hpp"
#include "newsrag/embedder.hpp"
#include "newsrag/error.hpp"
#include "newsrag/vector_index.hpp"

using namespace newsrag;
using newsrag::testing::StubEmbedServer;

namespace {

double norm_of(const EmbeddingVector& v) {
  double s = 0.0;
  for (float x : v.values) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

EmbedderConfig remote_config(const std::string& url) {
  EmbedderConfig config;
  config.kind = EmbedderConfig::Kind::kRemote;
  config.endpoint_url = url;
  config.dim = 64;
  config.max_retries = 1;
  config.retry_base_ms = 1;
  config.timeout_ms = 2000;
  return config;
}

}  // namespace

TEST_CASE("deterministic embedder is deterministic") {
  DeterministicEmbedder embedder(768);
  const EmbeddingVector a = embedder.embed_text("abc");
  const EmbeddingVector b = embedder.embed_text("abc");
  CHECK(a == b);
  CHECK(a.dim() == 768);
  CHECK(a.all_finite());
}

TEST_CASE("token overlap orders similarity as expected") {
  DeterministicEmbedder embedder(768);
  const auto base = embedder.embed_text("the red car");
  const auto close = embedder.embed_text("the red car sped");
  const auto far = embedder.embed_text("quarterly earnings call");
  CHECK(cosine_similarity(base, close) > cosine_similarity(base, far));
}

TEST_CASE("output norm is one for any non-empty text") {
  DeterministicEmbedder embedder(96);
  for (const char* text : {"a", "hello world", "The Senator won!", "!!!", "123 456 123",
                           "caf\xc3\xa9 au lait", "x y z w v u t s r q p"}) {
    CHECK(norm_of(embedder.embed_text(text)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("tokenization lowercases and splits on non-alphanumerics") {
  CHECK(tokenize_lower("The Red-Car, 42!") ==
        std::vector<std::string>{"the", "red", "car", "42"});
  CHECK(tokenize_lower("...") == std::vector<std::string>{});
}

TEST_CASE("embedding empty text fails") {
  DeterministicEmbedder embedder(16);
  CHECK_THROWS_AS(embedder.embed_text(""), Error);
  CHECK_THROWS_AS(embedder.embed_text("   \t\n"), Error);
  CHECK_THROWS_AS(embedder.embed_batch({}), Error);
}

TEST_CASE("batch order matches input order, duplicates identical") {
  DeterministicEmbedder embedder(64);
  const auto out = embedder.embed_batch({"alpha", "beta", "alpha"});
  REQUIRE(out.size() == 3);
  CHECK(out[0] == out[2]);
  CHECK(out[0] == embedder.embed_text("alpha"));
  CHECK(out[1] == embedder.embed_text("beta"));
}

TEST_CASE("remote embedder round-trips through the endpoint contract") {
  StubEmbedServer stub(64);
  RemoteEmbedder remote(remote_config(stub.url()));
  DeterministicEmbedder local(64);

  const auto via_http = remote.embed_text("breaking news tonight");
  CHECK(via_http.dim() == 64);
  // Stub serves the same deterministic embedding, so values agree.
  CHECK(via_http == local.embed_text("breaking news tonight"));
}

TEST_CASE("remote embedder maps 503 to a retriable endpoint error") {
  StubEmbedServer stub(64);
  stub.fail_with(503);
  RemoteEmbedder remote(remote_config(stub.url()));
  try {
    remote.embed_text("hello world");
    FAIL("expected EndpointError");
  } catch (const EndpointError& e) {
    CHECK(e.status() == 503);
    CHECK(e.retriable());
  }
}

TEST_CASE("remote embedder treats 4xx as fatal without retries") {
  StubEmbedServer stub(64);
  stub.fail_with(400);
  RemoteEmbedder remote(remote_config(stub.url()));
  try {
    remote.embed_text("hello world");
    FAIL("expected EndpointError");
  } catch (const EndpointError& e) {
    CHECK(e.status() == 400);
    CHECK_FALSE(e.retriable());
  }
  CHECK(stub.requests() == 1);  // no retry on fatal status
}

TEST_CASE("batching splits into ceil(n / max_batch) upstream requests") {
  StubEmbedServer stub(64);
  EmbedderConfig config = remote_config(stub.url());
  config.max_batch = 100;
  RemoteEmbedder remote(config);

  std::vector<std::string> texts;
  for (int i = 0; i < 250; ++i) texts.push_back("text number " + std::to_string(i));
  const auto vectors = remote.embed_batch(texts);
  CHECK(vectors.size() == 250);
  CHECK(stub.requests() == 3);

  DeterministicEmbedder local(64);
  CHECK(vectors[0] == local.embed_text(texts[0]));
  CHECK(vectors[249] == local.embed_text(texts[249]));
}

TEST_CASE("oversized batches and texts are rejected, never truncated") {
  StubEmbedServer stub(64);
  EmbedderConfig config = remote_config(stub.url());
  config.max_texts_per_call = 10;
  config.max_text_chars = 50;
  RemoteEmbedder remote(config);

  std::vector<std::string> too_many(11, "ok");
  CHECK_THROWS_AS(remote.embed_batch(too_many), Error);

  const std::string long_text(51, 'x');
  try {
    remote.embed_text(long_text);
    FAIL("expected TEXT_TOO_LONG");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TextTooLong);
  }
  CHECK(stub.requests() == 0);  // rejected client-side
}

TEST_CASE("dimension mismatch from the endpoint is a hard error") {
  StubEmbedServer stub(32);  // serves 32-dim vectors
  EmbedderConfig config = remote_config(stub.url());
  config.dim = 64;  // client expects 64
  RemoteEmbedder remote(config);
  try {
    remote.embed_text("mismatch");
    FAIL("expected DIMENSION_MISMATCH");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("make_embedder dispatches on kind") {
  EmbedderConfig config;
  config.kind = EmbedderConfig::Kind::kDeterministic;
  config.dim = 32;
  const auto embedder = make_embedder(config);
  CHECK(embedder->dim() == 32);
  CHECK(embedder->embed_text("x").dim() == 32);
}

#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "../support/stub_server.hpp"
#include "newsrag/error.hpp"
#include "newsrag/llm_client.hpp"
#include "newsrag/qa_generator.hpp"

using namespace newsrag;
using nlohmann::json;

namespace {

Document make_doc(const std::string& id, const std::string& content) {
  Document doc;
  doc.doc_id = id;
  doc.page_content = content;
  doc.metadata.recording_id = id;
  doc.metadata.language = "en";
  doc.metadata.source = "CNN";
  return doc;
}

QAPair pair_of(const std::string& q, const std::string& a) {
  QAPair p;
  p.instruction = q;
  p.output = a;
  p.language = "en";
  p.source_recording_id = "r1";
  return p;
}

}  // namespace

TEST_CASE("prompt embeds the transcript verbatim and states the contract") {
  const Document doc = make_doc("r1", "The senator won narrowly. Turnout was high.");
  const std::string prompt = build_selfinstruct_prompt(doc, 7);
  CHECK(prompt.find(doc.page_content) != std::string::npos);
  CHECK(prompt.find("exactly 7") != std::string::npos);
  CHECK(prompt.find("without repetition") != std::string::npos);
  CHECK(prompt.find("1. Q:") != std::string::npos);  // grammar is pinned in the prompt
}

TEST_CASE("identical documents produce identical prompts") {
  const Document a = make_doc("r1", "Same content here.");
  const Document b = make_doc("r2", "Same content here.");
  CHECK(build_selfinstruct_prompt(a, 10) == build_selfinstruct_prompt(b, 10));
}

TEST_CASE("target pair count is guarded") {
  const Document doc = make_doc("r1", "Content.");
  CHECK_THROWS_AS(build_selfinstruct_prompt(doc, 0), Error);
  CHECK_THROWS_AS(build_selfinstruct_prompt(doc, 51), Error);
  CHECK_NOTHROW(build_selfinstruct_prompt(doc, 50));
}

TEST_CASE("single block parses with provenance") {
  const Document doc = make_doc("rec-42", "transcript");
  const ParsedQaResponse parsed = parse_qa_response("1. Q: Who won?\nA: The senator.", doc);
  REQUIRE(parsed.pairs.size() == 1);
  CHECK(parsed.pairs[0].instruction == "Who won?");
  CHECK(parsed.pairs[0].output == "The senator.");
  CHECK(parsed.pairs[0].language == "en");
  CHECK(parsed.pairs[0].source_recording_id == "rec-42");
  CHECK(parsed.dropped_blocks == 0);
}

TEST_CASE("truncated trailing block is dropped and counted") {
  const std::string response =
      "Here are your pairs:\n"
      "1. Q: Who won?\nA: The senator.\n\n"
      "2. Q: What was turnout?\nA: High.\n\n"
      "3. Q: Where?\nA: Ohio.\n\n"
      "4. Q: What about\n";  // truncated, no answer
  const ParsedQaResponse parsed = parse_qa_response(response, make_doc("r1", "t"));
  CHECK(parsed.pairs.size() == 3);
  CHECK(parsed.dropped_blocks == 1);
}

TEST_CASE("multi-line answers fold into one output") {
  const std::string response = "1. Q: What happened?\nA: A storm hit.\nPower failed.\n";
  const ParsedQaResponse parsed = parse_qa_response(response, make_doc("r1", "t"));
  REQUIRE(parsed.pairs.size() == 1);
  CHECK(parsed.pairs[0].output == "A storm hit. Power failed.");
}

TEST_CASE("empty or pairless responses raise NO_PAIRS_FOUND") {
  const Document doc = make_doc("r1", "t");
  for (const char* raw : {"", "no blocks at all", "A: answer with no question"}) {
    try {
      parse_qa_response(raw, doc);
      FAIL("expected NO_PAIRS_FOUND");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoPairsFound);
    }
  }
}

TEST_CASE("grammar round-trip recovers random pair lists") {
  static const char* kQuestionWords[] = {"Who",  "What", "When", "Where",
                                         "Why",  "How",  "Which"};
  static const char* kBodyWords[] = {"senator", "storm",  "economy", "vote",
                                     "debate",  "mayor",  "verdict", "budget"};
  std::mt19937 rng(424242);
  std::uniform_int_distribution<int> qw(0, 6), bw(0, 7), words(2, 8), count(1, 8);

  const Document doc = make_doc("r1", "t");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<QAPair> pairs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      std::string q = kQuestionWords[qw(rng)];
      for (int w = words(rng); w > 0; --w) q += std::string(" ") + kBodyWords[bw(rng)];
      q += " " + std::to_string(trial) + "-" + std::to_string(i) + "?";
      std::string a = "The";
      for (int w = words(rng); w > 0; --w) a += std::string(" ") + kBodyWords[bw(rng)];
      a += ".";
      pairs.push_back(pair_of(q, a));
    }
    const ParsedQaResponse parsed = parse_qa_response(render_qa_pairs(pairs), doc);
    REQUIRE(parsed.pairs.size() == pairs.size());
    CHECK(parsed.dropped_blocks == 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(parsed.pairs[i].instruction == pairs[i].instruction);
      CHECK(parsed.pairs[i].output == pairs[i].output);
    }
  }
}

TEST_CASE("dedup collapses normalized duplicates, first wins") {
  const std::vector<QAPair> pairs = {
      pair_of("Who won?", "A."),
      pair_of("who won", "B."),
      pair_of("WHO   WON!!", "C."),
      pair_of("What was turnout?", "D."),
  };
  const auto deduped = dedup_pairs(pairs);
  REQUIRE(deduped.size() == 2);
  CHECK(deduped[0].output == "A.");  // first occurrence wins
  CHECK(deduped[1].instruction == "What was turnout?");
}

TEST_CASE("dedup leaves disjoint instructions unchanged") {
  const std::vector<QAPair> pairs = {pair_of("Who won?", "A."), pair_of("Who lost?", "B.")};
  CHECK(dedup_pairs(pairs) == pairs);
}

TEST_CASE("dedup is idempotent") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> variant(0, 2), base(0, 25);
  std::vector<QAPair> pairs;
  for (int i = 0; i < 500; ++i) {
    std::string q = "question " + std::to_string(base(rng));
    if (variant(rng) == 1) q = "Question " + std::to_string(base(rng)) + "?";
    if (variant(rng) == 2) q = " QUESTION   " + std::to_string(base(rng)) + " !";
    pairs.push_back(pair_of(q, "answer"));
  }
  const auto once = dedup_pairs(pairs);
  CHECK(dedup_pairs(once) == once);
  CHECK(once.size() <= 26);
}

TEST_CASE("normalization examples") {
  CHECK(normalize_instruction("Who won?") == "who won");
  CHECK(normalize_instruction("  WHO   won!! ") == "who won");
  CHECK(normalize_instruction("a-b c") == "ab c");
}

TEST_CASE("manifest matches the qa-pairs table schema") {
  std::vector<QAPair> fine_tune(5, pair_of("q", "a"));
  std::vector<QAPair> evaluation(2, pair_of("q2", "a2"));
  QAPair fr = pair_of("qf", "af");
  fr.language = "fr";
  fine_tune.push_back(fr);

  const json manifest = qa_manifest_json(fine_tune, evaluation);
  CHECK(manifest.at("columns") == json({"language", "fine_tune", "evaluation"}));
  REQUIRE(manifest.at("rows").size() == 2);
  CHECK(manifest.at("rows")[0].at("language") == "en");
  CHECK(manifest.at("rows")[0].at("fine_tune") == 5);
  CHECK(manifest.at("rows")[0].at("evaluation") == 2);
  CHECK(manifest.at("rows")[1].at("language") == "fr");
  CHECK(manifest.at("rows")[1].at("fine_tune") == 1);
}

TEST_CASE("generation pipeline survives per-document failures") {
  using newsrag::testing::StubChatServer;
  StubChatServer stub([](const std::string& prompt) -> std::string {
    if (prompt.find("POISON") != std::string::npos) return "no pairs here";
    return "1. Q: What was reported?\nA: Breaking news was reported.\n"
           "2. Q: What was reported?\nA: Duplicate question to dedup.\n";
  });
  LlmClientConfig llm;
  llm.endpoint_url = stub.url();
  llm.model_id = "stub";
  llm.max_retries = 0;
  HttpChatClient chat(llm);

  const std::vector<Document> docs = {
      make_doc("d1", "Good content one."),
      make_doc("d2", "POISON content."),
      make_doc("d3", "Good content three."),
  };
  QaGenerationConfig config;
  config.concurrency = 2;
  const QaGenerationReport report = generate_qa_corpus(docs, config, chat);
  CHECK(report.documents_processed == 3);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].doc_id == "d2");
  CHECK(report.pairs.size() == 2);  // 2 docs x 2 pairs, deduped to 1 each
  for (const QAPair& p : report.pairs) {
    CHECK(p.source_recording_id.has_value());
  }
}

TEST_CASE("qa jsonl round-trips") {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "newsrag_qa_pairs.jsonl";
  const std::vector<QAPair> pairs = {pair_of("Who won?", "The senator."),
                                     pair_of("What next?", "A recount.")};
  write_qa_jsonl(path, pairs);
  CHECK(read_qa_jsonl(path) == pairs);
  std::filesystem::remove(path);
}

// newsrag: end-to-end CLI over the transcript QA pipeline.
//
// Verbs: ingest, chunk, index build|export|import, ask, extract-qa,
// evaluate, serve. Exit codes: 0 success, 1 validation failure, 2 I/O or
// endpoint failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "newsrag/chunker.hpp"
#include "newsrag/config.hpp"
#include "newsrag/embedder.hpp"
#include "newsrag/error.hpp"
#include "newsrag/eval.hpp"
#include "newsrag/llm_client.hpp"
#include "newsrag/logging.hpp"
#include "newsrag/qa_generator.hpp"
#include "newsrag/rag_engine.hpp"
#include "newsrag/service.hpp"
#include "newsrag/transcript.hpp"
#include "newsrag/vector_index.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace newsrag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::IoError:
    case ErrorCode::EndpointUnavailable:
    case ErrorCode::CorruptSnapshot:
    case ErrorCode::VersionUnsupported:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

void write_json_file(const fs::path& path, const json& value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::optional<fs::path> config_path_from(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* env = std::getenv("NEWSRAG_CONFIG"); env && *env) return fs::path(env);
  return std::nullopt;
}

std::shared_ptr<const VectorIndex> load_index(const ServiceConfig& config,
                                              const std::string& snapshot_flag) {
  const std::string path = !snapshot_flag.empty() ? snapshot_flag : config.snapshot_path;
  if (path.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no snapshot path given (--snapshot or config)");
  }
  return std::make_shared<VectorIndex>(VectorIndex::load_snapshot(path));
}

int cmd_ingest(const std::string& dir, const std::string& out, const std::string& manifest_path,
               const std::string& language, int concurrency) {
  IngestOptions options;
  if (!language.empty()) options.language_filter = language;
  options.concurrency = concurrency;

  const IngestReport report = ingest_directory(dir, out, options);
  write_json_file(manifest_path, manifest_to_json(report.manifest));
  for (const IngestFileError& e : report.errors) {
    log_warn("file skipped", {{"file", e.file},
                              {"line", std::to_string(e.line)},
                              {"code", e.code},
                              {"error", e.message}});
  }
  std::cout << "ingested " << report.documents_written << " documents ("
            << report.errors.size() << " files skipped) -> " << out << "\n";
  return kExitOk;
}

int cmd_chunk(const ServiceConfig& config, const std::string& in, const std::string& out,
              std::optional<std::size_t> max_chars, std::optional<std::size_t> overlap_chars) {
  ChunkPolicy policy = config.chunker;
  if (max_chars) policy.max_chars = *max_chars;
  if (overlap_chars) policy.overlap_chars = *overlap_chars;

  const std::vector<Document> docs = read_documents_jsonl(in);
  std::ofstream sink(out, std::ios::trunc);
  if (!sink) throw Error(ErrorCode::IoError, "cannot open " + out + " for writing");

  std::size_t total = 0;
  for (const Document& doc : docs) {
    for (const DocumentChunk& chunk : split_document(doc, policy)) {
      sink << json(chunk).dump() << '\n';
      ++total;
    }
  }
  if (!sink) throw Error(ErrorCode::IoError, "failed writing " + out);
  std::cout << "wrote " << total << " chunks from " << docs.size() << " documents -> " << out
            << "\n";
  return kExitOk;
}

std::vector<DocumentChunk> read_chunks_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<DocumentChunk> chunks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      chunks.push_back(json::parse(line).get<DocumentChunk>());
    } catch (const json::exception& e) {
      throw ParseError(ErrorCode::MalformedLine, line_no, e.what());
    }
  }
  return chunks;
}

int cmd_index_build(const ServiceConfig& config, const std::string& chunks_path,
                    const std::string& out) {
  const std::vector<DocumentChunk> chunks = read_chunks_jsonl(chunks_path);
  if (chunks.empty()) throw Error(ErrorCode::EmptyInput, "no chunks in " + chunks_path);

  const std::unique_ptr<Embedder> embedder = make_embedder(config.embedder);
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const DocumentChunk& c : chunks) texts.push_back(c.text);
  const std::vector<EmbeddingVector> vectors = embedder->embed_batch(texts);

  VectorIndex index(embedder->dim());
  std::vector<IndexedChunk> items;
  items.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    items.push_back(IndexedChunk{chunks[i], vectors[i]});
  }
  const UpsertStats stats = index.upsert(items);
  index.save_snapshot(out);
  std::cout << "indexed " << stats.inserted << " chunks (dim " << embedder->dim() << ") -> "
            << out << "\n";
  return kExitOk;
}

int cmd_ask(const ServiceConfig& config, const std::string& question, bool no_rag,
            std::optional<std::size_t> k, const std::string& snapshot_flag,
            const std::string& language) {
  EngineConfig engine_config = config.engine;
  if (no_rag) engine_config.use_rag = false;
  if (k) engine_config.k = *k;
  if (!language.empty()) engine_config.filter.language = language;

  std::shared_ptr<const VectorIndex> index;
  if (engine_config.use_rag) index = load_index(config, snapshot_flag);

  const RagEngine engine(index, make_embedder(config.embedder),
                         std::make_shared<HttpChatClient>(config.llm));
  const Answer answer = engine.answer(question, engine_config);

  json sources = json::array();
  for (const SearchHit& hit : answer.sources) {
    const auto chunk = index->find_chunk(hit.chunk_id);
    sources.push_back({
        {"chunk_id", hit.chunk_id},
        {"recording_id", chunk->metadata.recording_id},
        {"start_time", format_utc(chunk->metadata.start_time)},
        {"end_time", format_utc(chunk->metadata.end_time)},
        {"score", hit.score},
    });
  }
  std::cout << json{{"answer", answer.text},
                    {"sources", sources},
                    {"model_id", answer.model_id},
                    {"template_version", answer.template_version}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int cmd_extract_qa(const ServiceConfig& config, const std::string& corpus, const std::string& out,
                   const std::string& manifest_path, int target_pairs, std::size_t eval_count,
                   int concurrency) {
  const std::vector<Document> docs = read_documents_jsonl(corpus);
  if (docs.empty()) throw Error(ErrorCode::EmptyInput, "no documents in " + corpus);

  HttpChatClient chat(config.llm);
  QaGenerationConfig generation;
  generation.target_pairs = target_pairs;
  generation.concurrency = concurrency;
  const QaGenerationReport report = generate_qa_corpus(docs, generation, chat);

  // Hold out the last eval_count pairs per language for the evaluation split.
  std::vector<QAPair> fine_tune, evaluation;
  if (eval_count > 0) {
    std::map<std::string, std::size_t> language_totals;
    for (const QAPair& p : report.pairs) ++language_totals[p.language];
    std::map<std::string, std::size_t> seen;
    for (const QAPair& p : report.pairs) {
      const std::size_t position = seen[p.language]++;
      const std::size_t total = language_totals[p.language];
      if (total > eval_count && position >= total - eval_count) {
        evaluation.push_back(p);
      } else {
        fine_tune.push_back(p);
      }
    }
  } else {
    fine_tune = report.pairs;
  }

  write_qa_jsonl(out, fine_tune);
  if (!evaluation.empty()) {
    const fs::path eval_path = fs::path(out).replace_extension(".eval.jsonl");
    write_qa_jsonl(eval_path, evaluation);
    std::cout << "evaluation split -> " << eval_path.string() << "\n";
  }
  write_json_file(manifest_path, qa_manifest_json(fine_tune, evaluation));

  std::cout << "generated " << report.pairs.size() << " pairs from "
            << report.documents_processed << " documents (" << report.failures.size()
            << " failures, " << report.dropped_blocks << " malformed blocks) -> " << out << "\n";
  return report.failures.empty() ? kExitOk : kExitIo;
}

int cmd_evaluate(const ServiceConfig& config, const std::string& eval_path,
                 const std::string& out, bool no_rag, const std::string& snapshot_flag,
                 int concurrency) {
  const std::vector<QAPair> eval_set = read_qa_jsonl(eval_path);
  if (eval_set.empty()) throw Error(ErrorCode::EmptyInput, "no pairs in " + eval_path);

  EngineConfig engine_config = config.engine;
  if (no_rag) engine_config.use_rag = false;

  std::shared_ptr<const VectorIndex> index;
  if (engine_config.use_rag) index = load_index(config, snapshot_flag);

  auto chat = std::make_shared<HttpChatClient>(config.llm);
  const std::unique_ptr<Embedder> embedder = make_embedder(config.embedder);
  const RagEngine engine(index, make_embedder(config.embedder), chat);

  std::shared_ptr<ChatClient> judge_chat;
  JudgeConfig judge_config = config.judge;
  if (judge_config.kind == JudgeConfig::Kind::kLlm) {
    LlmClientConfig judge_llm = config.llm;
    if (judge_config.endpoint) judge_llm.endpoint_url = *judge_config.endpoint;
    judge_chat = std::make_shared<HttpChatClient>(judge_llm);
  }
  const Judge judge(judge_config, judge_chat);

  EvalRunOptions options;
  options.concurrency = concurrency;
  const EvalReport report = run_eval(eval_set, engine, engine_config, judge, *embedder, options);

  if (!out.empty()) write_json_file(out, eval_report_to_json(report));
  std::cout << render_report_table(report);

  std::size_t failures = 0;
  for (const SampleScore& s : report.samples) {
    if (s.error) ++failures;
  }
  if (failures > 0) {
    std::cout << failures << " of " << report.samples.size() << " samples failed\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_serve(const ServiceConfig& config) {
  QueryService service(config);
  if (!service.initialize()) {
    log_warn("service starting not ready; will re-probe on /healthz");
  }
  service.run();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadcast-news transcript QA pipeline"};
  app.require_subcommand(1);

  std::string config_flag;
  app.add_option("--config", config_flag, "Config file (JSON); NEWSRAG_CONFIG works too")
      ->envname("");
  std::string log_level_flag;
  app.add_option("--log-level", log_level_flag, "debug|info|warn|error");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse raw transcripts into a Document corpus");
  std::string ingest_dir, ingest_out = "documents.jsonl", ingest_manifest = "manifest.json",
              ingest_language;
  int ingest_concurrency = 4;
  ingest->add_option("dir", ingest_dir, "Directory of *.txt transcripts")->required();
  ingest->add_option("--out", ingest_out, "Documents JSONL output");
  ingest->add_option("--manifest", ingest_manifest, "Corpus manifest JSON output");
  ingest->add_option("--language", ingest_language, "Keep only this language");
  ingest->add_option("--concurrency", ingest_concurrency, "Parser threads");

  // chunk
  auto* chunk = app.add_subcommand("chunk", "Split documents into overlapping chunks");
  std::string chunk_in = "documents.jsonl", chunk_out = "chunks.jsonl";
  std::optional<std::size_t> chunk_max, chunk_overlap;
  chunk->add_option("--in", chunk_in, "Documents JSONL input");
  chunk->add_option("--out", chunk_out, "Chunks JSONL output");
  chunk->add_option("--max-chars", chunk_max, "Chunk size cap (default 1000)");
  chunk->add_option("--overlap-chars", chunk_overlap, "Chunk overlap (default 200)");

  // index build|export|import
  auto* index_cmd = app.add_subcommand("index", "Build or convert vector indexes");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "Embed chunks and write a snapshot");
  std::string ib_chunks = "chunks.jsonl", ib_out = "index.nrvi";
  index_build->add_option("--chunks", ib_chunks, "Chunks JSONL input");
  index_build->add_option("--out", ib_out, "Snapshot output path");
  auto* index_export = index_cmd->add_subcommand("export", "Snapshot -> JSONL");
  std::string ie_in = "index.nrvi", ie_out = "index.jsonl";
  index_export->add_option("--in", ie_in, "Snapshot input");
  index_export->add_option("--out", ie_out, "JSONL output");
  auto* index_import = index_cmd->add_subcommand("import", "JSONL -> snapshot");
  std::string ii_in = "index.jsonl", ii_out = "index.nrvi";
  index_import->add_option("--in", ii_in, "JSONL input");
  index_import->add_option("--out", ii_out, "Snapshot output");

  // ask
  auto* ask = app.add_subcommand("ask", "Answer one question");
  std::string ask_question, ask_snapshot, ask_language;
  bool ask_no_rag = false;
  std::optional<std::size_t> ask_k;
  ask->add_option("question", ask_question, "The question")->required();
  ask->add_flag("--no-rag", ask_no_rag, "Skip retrieval; plain prompt");
  ask->add_option("--k", ask_k, "Retrieved contexts (default 4)");
  ask->add_option("--snapshot", ask_snapshot, "Snapshot path (overrides config)");
  ask->add_option("--language", ask_language, "Restrict retrieval to a language");

  // extract-qa
  auto* extract = app.add_subcommand("extract-qa", "Generate QA pairs from a corpus");
  std::string eq_corpus, eq_out = "qa_pairs.jsonl", eq_manifest = "qa_manifest.json";
  int eq_target = 10, eq_concurrency = 4;
  std::size_t eq_eval_count = 0;
  extract->add_option("corpus", eq_corpus, "Documents JSONL input")->required();
  extract->add_option("--out", eq_out, "Alpaca JSONL output");
  extract->add_option("--manifest", eq_manifest, "Dataset manifest JSON output");
  extract->add_option("--target-pairs", eq_target, "Pairs per document (default 10)");
  extract->add_option("--eval-count", eq_eval_count, "Held-out pairs per language");
  extract->add_option("--concurrency", eq_concurrency, "Concurrent documents");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score the pipeline on an eval set");
  std::string ev_in, ev_out = "eval_report.json", ev_snapshot;
  bool ev_no_rag = false;
  int ev_concurrency = 4;
  evaluate->add_option("eval", ev_in, "Evaluation set (Alpaca JSONL)")->required();
  evaluate->add_option("--out", ev_out, "Report JSON output");
  evaluate->add_flag("--no-rag", ev_no_rag, "Evaluate without retrieval");
  evaluate->add_option("--snapshot", ev_snapshot, "Snapshot path (overrides config)");
  evaluate->add_option("--concurrency", ev_concurrency, "Concurrent samples");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP query service");

  CLI11_PARSE(app, argc, argv);

  try {
    ServiceConfig config = resolve_config(config_path_from(config_flag));
    if (!log_level_flag.empty()) config.log_level = parse_log_level(log_level_flag);
    set_log_level(config.log_level);

    if (ingest->parsed()) {
      return cmd_ingest(ingest_dir, ingest_out, ingest_manifest, ingest_language,
                        ingest_concurrency);
    }
    if (chunk->parsed()) return cmd_chunk(config, chunk_in, chunk_out, chunk_max, chunk_overlap);
    if (index_build->parsed()) return cmd_index_build(config, ib_chunks, ib_out);
    if (index_export->parsed()) {
      VectorIndex::load_snapshot(ie_in).export_jsonl(ie_out);
      std::cout << "exported -> " << ie_out << "\n";
      return kExitOk;
    }
    if (index_import->parsed()) {
      VectorIndex::import_jsonl(ii_in).save_snapshot(ii_out);
      std::cout << "imported -> " << ii_out << "\n";
      return kExitOk;
    }
    if (ask->parsed()) {
      return cmd_ask(config, ask_question, ask_no_rag, ask_k, ask_snapshot, ask_language);
    }
    if (extract->parsed()) {
      return cmd_extract_qa(config, eq_corpus, eq_out, eq_manifest, eq_target, eq_eval_count,
                            eq_concurrency);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(config, ev_in, ev_out, ev_no_rag, ev_snapshot, ev_concurrency);
    }
    if (serve->parsed()) return cmd_serve(config);
  } catch (const Error& e) {
    log_error(e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    log_error(e.what());
    return kExitIo;
  }
  return kExitValidation;
}

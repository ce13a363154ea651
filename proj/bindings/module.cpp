// Python bindings for the pipeline's main operations: parsing, chunking,
// embedding, indexing/search, prompt rendering, QA generation helpers and the
// evaluation metrics. HTTP clients and the service stay C++-side; Python gets
// the deterministic, in-process surface.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "newsrag/chunker.hpp"
#include "newsrag/embedder.hpp"
#include "newsrag/error.hpp"
#include "newsrag/eval.hpp"
#include "newsrag/prompt_template.hpp"
#include "newsrag/qa_generator.hpp"
#include "newsrag/transcript.hpp"
#include "newsrag/types.hpp"
#include "newsrag/vector_index.hpp"

namespace py = pybind11;
using namespace newsrag;
using nlohmann::json;

namespace {

std::string utc_string(UtcMillis ms) { return format_utc(ms); }

template <typename T>
std::string to_json_string(const T& value) {
  return json(value).dump();
}

template <typename T>
T from_json_string(const std::string& text) {
  return json::parse(text).get<T>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Broadcast-news transcript QA pipeline (C++ core)";

  py::register_exception<Error>(m, "NewsragError");

  // --- domain types -----------------------------------------------------
  py::class_<RecordingMetadata>(m, "RecordingMetadata")
      .def(py::init<>())
      .def_readwrite("recording_id", &RecordingMetadata::recording_id)
      .def_readwrite("language", &RecordingMetadata::language)
      .def_readwrite("source", &RecordingMetadata::source)
      .def_readwrite("duration_s", &RecordingMetadata::duration_s)
      .def_readwrite("resolution", &RecordingMetadata::resolution)
      .def_readwrite("collection", &RecordingMetadata::collection)
      .def_readwrite("start_time", &RecordingMetadata::start_time)
      .def_readwrite("end_time", &RecordingMetadata::end_time)
      .def("__eq__", [](const RecordingMetadata& a, const RecordingMetadata& b) { return a == b; })
      .def("to_json", &to_json_string<RecordingMetadata>)
      .def_static("from_json", &from_json_string<RecordingMetadata>);

  py::class_<Document>(m, "Document")
      .def(py::init<>())
      .def_readwrite("doc_id", &Document::doc_id)
      .def_readwrite("page_content", &Document::page_content)
      .def_readwrite("metadata", &Document::metadata)
      .def("__eq__", [](const Document& a, const Document& b) { return a == b; })
      .def("to_json", &to_json_string<Document>)
      .def_static("from_json", &from_json_string<Document>);

  py::class_<CharSpan>(m, "CharSpan")
      .def(py::init<>())
      .def_readwrite("start", &CharSpan::start)
      .def_readwrite("end", &CharSpan::end);

  py::class_<DocumentChunk>(m, "DocumentChunk")
      .def(py::init<>())
      .def_readwrite("chunk_id", &DocumentChunk::chunk_id)
      .def_readwrite("doc_id", &DocumentChunk::doc_id)
      .def_readwrite("ordinal", &DocumentChunk::ordinal)
      .def_readwrite("text", &DocumentChunk::text)
      .def_readwrite("char_span", &DocumentChunk::char_span)
      .def_readwrite("metadata", &DocumentChunk::metadata)
      .def("to_json", &to_json_string<DocumentChunk>)
      .def_static("from_json", &from_json_string<DocumentChunk>);

  py::class_<EmbeddingVector>(m, "EmbeddingVector")
      .def(py::init<>())
      .def(py::init([](std::vector<float> values) { return EmbeddingVector{std::move(values)}; }))
      .def_readwrite("values", &EmbeddingVector::values)
      .def_property_readonly("dim", &EmbeddingVector::dim);

  py::class_<QAPair>(m, "QAPair")
      .def(py::init<>())
      .def_readwrite("instruction", &QAPair::instruction)
      .def_readwrite("input", &QAPair::input)
      .def_readwrite("output", &QAPair::output)
      .def_readwrite("language", &QAPair::language)
      .def_readwrite("source_recording_id", &QAPair::source_recording_id)
      .def("__eq__", [](const QAPair& a, const QAPair& b) { return a == b; })
      .def("to_json", &to_json_string<QAPair>)
      .def_static("from_json", &from_json_string<QAPair>);

  py::class_<SearchHit>(m, "SearchHit")
      .def(py::init<>())
      .def_readwrite("chunk_id", &SearchHit::chunk_id)
      .def_readwrite("score", &SearchHit::score)
      .def_readwrite("rank", &SearchHit::rank);

  py::class_<Violation>(m, "Violation")
      .def_property_readonly("code", [](const Violation& v) { return violation_code_name(v.code); })
      .def_readonly("detail", &Violation::detail);

  m.def("validate_metadata", &validate_metadata);
  m.def("make_chunk_id", &make_chunk_id);
  m.def("parse_chunk_id", [](const std::string& id) { return parse_chunk_id(id); });
  m.def("parse_utc", [](const std::string& s) { return parse_utc(s); });
  m.def("format_utc", &utc_string);

  // --- parsing and chunking ----------------------------------------------
  m.def("parse_transcript", [](const std::string& raw) { return parse_transcript(raw); },
        "Parse a raw timestamped transcript into a Document");

  py::class_<ChunkPolicy>(m, "ChunkPolicy")
      .def(py::init<>())
      .def(py::init([](std::size_t max_chars, std::size_t overlap_chars) {
             return ChunkPolicy{max_chars, overlap_chars};
           }),
           py::arg("max_chars"), py::arg("overlap_chars"))
      .def_readwrite("max_chars", &ChunkPolicy::max_chars)
      .def_readwrite("overlap_chars", &ChunkPolicy::overlap_chars);

  m.def("split_document", &split_document, py::arg("doc"), py::arg("policy") = ChunkPolicy{});
  m.def("reassemble_chunks", &reassemble_chunks);

  // --- embedding -----------------------------------------------------------
  py::class_<DeterministicEmbedder>(m, "DeterministicEmbedder")
      .def(py::init<std::size_t>(), py::arg("dim") = 768)
      .def("embed_text", &DeterministicEmbedder::embed_text)
      .def("embed_batch", &DeterministicEmbedder::embed_batch)
      .def_property_readonly("dim", &DeterministicEmbedder::dim);

  m.def("tokenize_lower", [](const std::string& s) { return tokenize_lower(s); });
  m.def("cosine_similarity", &cosine_similarity);

  // --- vector index ---------------------------------------------------------
  py::class_<SearchFilter>(m, "SearchFilter")
      .def(py::init<>())
      .def_readwrite("language", &SearchFilter::language)
      .def_readwrite("source", &SearchFilter::source);

  py::class_<IndexedChunk>(m, "IndexedChunk")
      .def(py::init<>())
      .def(py::init([](DocumentChunk chunk, EmbeddingVector vector) {
             return IndexedChunk{std::move(chunk), std::move(vector)};
           }),
           py::arg("chunk"), py::arg("vector"))
      .def_readwrite("chunk", &IndexedChunk::chunk)
      .def_readwrite("vector", &IndexedChunk::vector);

  py::class_<VectorIndex>(m, "VectorIndex")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def_property_readonly("dim", &VectorIndex::dim)
      .def("__len__", &VectorIndex::size)
      .def("upsert",
           [](VectorIndex& index, const std::vector<IndexedChunk>& items) {
             const UpsertStats stats = index.upsert(items);
             return py::make_tuple(stats.inserted, stats.replaced);
           })
      .def("search", &VectorIndex::search, py::arg("query"), py::arg("k") = 4,
           py::arg("filter") = SearchFilter{})
      .def("find_chunk", &VectorIndex::find_chunk)
      .def("chunk_ids", &VectorIndex::chunk_ids)
      .def("save_snapshot", &VectorIndex::save_snapshot)
      .def_static("load_snapshot", &VectorIndex::load_snapshot)
      .def("export_jsonl", &VectorIndex::export_jsonl)
      .def_static("import_jsonl", &VectorIndex::import_jsonl);

  // --- prompts ---------------------------------------------------------------
  m.attr("USER_TOKEN") = std::string(kUserToken);
  m.attr("END_TOKEN") = std::string(kEndToken);
  m.attr("ASSISTANT_TOKEN") = std::string(kAssistantToken);
  m.attr("SYSTEM_INSTRUCTION") = std::string(kSystemInstruction);
  m.attr("FINETUNE_SYSTEM_PROMPT") = std::string(kFinetuneSystemPrompt);
  m.attr("TEMPLATE_VERSION") = std::string(kTemplateVersion);

  m.def("render_plain", [](const std::string& q) { return render_plain(q); });
  m.def("render_with_context",
        [](const std::string& q, const std::vector<std::string>& contexts) {
          return render_with_context(q, contexts);
        });
  m.def("sanitize_prompt_text", [](const std::string& t) { return sanitize_prompt_text(t); });

  // --- qa generation -----------------------------------------------------------
  m.def("build_selfinstruct_prompt", &build_selfinstruct_prompt, py::arg("doc"), py::arg("n"));
  m.def("parse_qa_response", [](const std::string& raw, const Document& doc) {
    const ParsedQaResponse parsed = parse_qa_response(raw, doc);
    return py::make_tuple(parsed.pairs, parsed.dropped_blocks);
  });
  m.def("render_qa_pairs", &render_qa_pairs);
  m.def("dedup_pairs", &dedup_pairs);
  m.def("normalize_instruction", [](const std::string& s) { return normalize_instruction(s); });

  // --- evaluation -----------------------------------------------------------------
  py::class_<EvalSample>(m, "EvalSample")
      .def(py::init<>())
      .def_readwrite("question", &EvalSample::question)
      .def_readwrite("ground_truth", &EvalSample::ground_truth)
      .def_readwrite("retrieved_contexts", &EvalSample::retrieved_contexts)
      .def_readwrite("generated_answer", &EvalSample::generated_answer);

  py::class_<JudgeConfig>(m, "JudgeConfig")
      .def(py::init<>())
      .def_readwrite("overlap_threshold", &JudgeConfig::overlap_threshold)
      .def_readwrite("correctness_weight", &JudgeConfig::correctness_weight)
      .def_readwrite("relevance_questions", &JudgeConfig::relevance_questions);

  py::class_<Judge>(m, "Judge")
      .def(py::init([](const JudgeConfig& config) { return Judge(config); }),
           py::arg("config") = JudgeConfig{})
      .def("split_statements", &Judge::split_statements)
      .def("statement_attributable", &Judge::statement_attributable);

  m.def("context_precision_from_flags", &context_precision_from_flags);
  m.def("answer_correctness_from_counts", &answer_correctness_from_counts, py::arg("tp"),
        py::arg("fp"), py::arg("fn"), py::arg("semantic_cos"), py::arg("w") = 0.75);
  m.def("context_recall", &context_recall);
  m.def("context_precision", &context_precision);
  m.def("answer_correctness",
        [](const EvalSample& sample, const Judge& judge, DeterministicEmbedder& embedder) {
          return answer_correctness(sample, judge, embedder);
        });
  m.def("answer_relevance",
        [](const EvalSample& sample, const Judge& judge, DeterministicEmbedder& embedder) {
          return answer_relevance(sample, judge, embedder);
        });
}

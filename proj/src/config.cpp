#include "newsrag/config.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"

namespace newsrag {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& where, const std::string& key) {
  throw Error(ErrorCode::InvalidConfig, "unknown key \"" + key + "\" in " + where);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (std::string_view a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) bad_key(where, key);
  }
}

EmbedderConfig::Kind parse_embedder_kind(const std::string& kind) {
  if (kind == "deterministic") return EmbedderConfig::Kind::kDeterministic;
  if (kind == "remote") return EmbedderConfig::Kind::kRemote;
  throw Error(ErrorCode::InvalidConfig, "embedder kind must be \"deterministic\" or \"remote\"");
}

JudgeConfig::Kind parse_judge_kind(const std::string& kind) {
  if (kind == "lexical") return JudgeConfig::Kind::kLexical;
  if (kind == "llm") return JudgeConfig::Kind::kLlm;
  throw Error(ErrorCode::InvalidConfig, "judge kind must be \"lexical\" or \"llm\"");
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

bool parse_bool(const std::string& v, const char* name) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be true/false");
}

}  // namespace

ServiceConfig default_config() { return ServiceConfig{}; }

ServiceConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json parsed;
  try {
    in >> parsed;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "config is not valid JSON: " + std::string(e.what()));
  }

  ServiceConfig config;
  try {
    check_keys(parsed, "config",
               {"bind_addr", "snapshot_path", "embedder", "llm", "engine", "chunker", "judge",
                "log_level"});
    config.bind_addr = parsed.value("bind_addr", config.bind_addr);
    config.snapshot_path = parsed.value("snapshot_path", config.snapshot_path);
    if (parsed.contains("log_level")) {
      config.log_level = parse_log_level(parsed.at("log_level").get<std::string>());
    }

    if (parsed.contains("embedder")) {
      const json& e = parsed.at("embedder");
      check_keys(e, "embedder",
                 {"kind", "endpoint_url", "model_name", "dim", "timeout_ms", "max_batch",
                  "max_texts_per_call", "max_text_chars", "max_retries", "retry_base_ms",
                  "max_concurrent_requests"});
      if (e.contains("kind")) config.embedder.kind = parse_embedder_kind(e.at("kind"));
      config.embedder.endpoint_url = e.value("endpoint_url", config.embedder.endpoint_url);
      config.embedder.model_name = e.value("model_name", config.embedder.model_name);
      config.embedder.dim = e.value("dim", config.embedder.dim);
      config.embedder.timeout_ms = e.value("timeout_ms", config.embedder.timeout_ms);
      config.embedder.max_batch = e.value("max_batch", config.embedder.max_batch);
      config.embedder.max_texts_per_call =
          e.value("max_texts_per_call", config.embedder.max_texts_per_call);
      config.embedder.max_text_chars = e.value("max_text_chars", config.embedder.max_text_chars);
      config.embedder.max_retries = e.value("max_retries", config.embedder.max_retries);
      config.embedder.retry_base_ms = e.value("retry_base_ms", config.embedder.retry_base_ms);
      config.embedder.max_concurrent_requests =
          e.value("max_concurrent_requests", config.embedder.max_concurrent_requests);
    }

    if (parsed.contains("llm")) {
      const json& l = parsed.at("llm");
      check_keys(l, "llm",
                 {"endpoint_url", "model_id", "max_new_tokens", "temperature", "timeout_ms",
                  "max_retries", "retry_base_ms"});
      config.llm.endpoint_url = l.value("endpoint_url", config.llm.endpoint_url);
      config.llm.model_id = l.value("model_id", config.llm.model_id);
      config.llm.max_new_tokens = l.value("max_new_tokens", config.llm.max_new_tokens);
      config.llm.temperature = l.value("temperature", config.llm.temperature);
      config.llm.timeout_ms = l.value("timeout_ms", config.llm.timeout_ms);
      config.llm.max_retries = l.value("max_retries", config.llm.max_retries);
      config.llm.retry_base_ms = l.value("retry_base_ms", config.llm.retry_base_ms);
    }

    if (parsed.contains("engine")) {
      const json& g = parsed.at("engine");
      check_keys(g, "engine", {"k", "use_rag", "prompt_char_budget", "language", "source"});
      config.engine.k = g.value("k", config.engine.k);
      config.engine.use_rag = g.value("use_rag", config.engine.use_rag);
      config.engine.prompt_char_budget =
          g.value("prompt_char_budget", config.engine.prompt_char_budget);
      if (g.contains("language")) {
        config.engine.filter.language = g.at("language").get<std::string>();
      }
      if (g.contains("source")) config.engine.filter.source = g.at("source").get<std::string>();
    }

    if (parsed.contains("chunker")) {
      const json& c = parsed.at("chunker");
      check_keys(c, "chunker", {"max_chars", "overlap_chars"});
      config.chunker.max_chars = c.value("max_chars", config.chunker.max_chars);
      config.chunker.overlap_chars = c.value("overlap_chars", config.chunker.overlap_chars);
    }

    if (parsed.contains("judge")) {
      const json& j = parsed.at("judge");
      check_keys(j, "judge",
                 {"kind", "endpoint", "overlap_threshold", "statement_splitter",
                  "correctness_weight", "relevance_questions"});
      if (j.contains("kind")) config.judge.kind = parse_judge_kind(j.at("kind"));
      if (j.contains("endpoint")) config.judge.endpoint = j.at("endpoint").get<std::string>();
      config.judge.overlap_threshold =
          j.value("overlap_threshold", config.judge.overlap_threshold);
      if (j.contains("statement_splitter")) {
        const std::string s = j.at("statement_splitter").get<std::string>();
        if (s == "sentence") {
          config.judge.statement_splitter = JudgeConfig::Splitter::kSentence;
        } else if (s == "llm") {
          config.judge.statement_splitter = JudgeConfig::Splitter::kLlm;
        } else {
          throw Error(ErrorCode::InvalidConfig, "statement_splitter must be sentence or llm");
        }
      }
      config.judge.correctness_weight =
          j.value("correctness_weight", config.judge.correctness_weight);
      config.judge.relevance_questions =
          j.value("relevance_questions", config.judge.relevance_questions);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "config type error: " + std::string(e.what()));
  }
  return config;
}

void apply_env_overrides(ServiceConfig& config) {
  if (const auto v = env("NEWSRAG_BIND_ADDR")) config.bind_addr = *v;
  if (const auto v = env("NEWSRAG_SNAPSHOT_PATH")) config.snapshot_path = *v;
  if (const auto v = env("NEWSRAG_LOG_LEVEL")) config.log_level = parse_log_level(*v);

  if (const auto v = env("NEWSRAG_EMBEDDER_KIND")) config.embedder.kind = parse_embedder_kind(*v);
  if (const auto v = env("NEWSRAG_EMBEDDER_ENDPOINT_URL")) config.embedder.endpoint_url = *v;
  if (const auto v = env("NEWSRAG_EMBEDDER_MODEL_NAME")) config.embedder.model_name = *v;
  if (const auto v = env("NEWSRAG_EMBEDDER_DIM")) {
    config.embedder.dim = static_cast<std::size_t>(std::stoull(*v));
  }

  if (const auto v = env("NEWSRAG_LLM_ENDPOINT_URL")) config.llm.endpoint_url = *v;
  if (const auto v = env("NEWSRAG_LLM_MODEL_ID")) config.llm.model_id = *v;
  if (const auto v = env("NEWSRAG_LLM_MAX_NEW_TOKENS")) config.llm.max_new_tokens = std::stoi(*v);
  if (const auto v = env("NEWSRAG_LLM_TEMPERATURE")) config.llm.temperature = std::stod(*v);

  if (const auto v = env("NEWSRAG_ENGINE_K")) {
    config.engine.k = static_cast<std::size_t>(std::stoull(*v));
  }
  if (const auto v = env("NEWSRAG_ENGINE_USE_RAG")) {
    config.engine.use_rag = parse_bool(*v, "NEWSRAG_ENGINE_USE_RAG");
  }
  if (const auto v = env("NEWSRAG_ENGINE_PROMPT_CHAR_BUDGET")) {
    config.engine.prompt_char_budget = static_cast<std::size_t>(std::stoull(*v));
  }

  if (const auto v = env("NEWSRAG_CHUNKER_MAX_CHARS")) {
    config.chunker.max_chars = static_cast<std::size_t>(std::stoull(*v));
  }
  if (const auto v = env("NEWSRAG_CHUNKER_OVERLAP_CHARS")) {
    config.chunker.overlap_chars = static_cast<std::size_t>(std::stoull(*v));
  }
}

ServiceConfig resolve_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig config = file ? load_config_file(*file) : default_config();
  apply_env_overrides(config);
  return config;
}

std::pair<std::string, int> split_bind_addr(const std::string& bind_addr) {
  const auto colon = bind_addr.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind_addr.size()) {
    throw Error(ErrorCode::InvalidConfig, "bind_addr must be host:port");
  }
  int port = 0;
  for (char c : bind_addr.substr(colon + 1)) {
    if (c < '0' || c > '9') throw Error(ErrorCode::InvalidConfig, "bad port in bind_addr");
    port = port * 10 + (c - '0');
  }
  if (port <= 0 || port > 65535) {
    throw Error(ErrorCode::InvalidConfig, "port out of range in bind_addr");
  }
  return {bind_addr.substr(0, colon), port};
}

}  // namespace newsrag

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "newsrag/chunker.hpp"
#include "newsrag/embedder.hpp"
#include "newsrag/eval.hpp"
#include "newsrag/llm_client.hpp"
#include "newsrag/logging.hpp"
#include "newsrag/rag_engine.hpp"

namespace newsrag {

// One file describes a full run: serving address, snapshot, endpoint clients,
// engine knobs, chunking and judging defaults. Environment variables with the
// NEWSRAG_ prefix override individual keys after the file loads.
struct ServiceConfig {
  std::string bind_addr = "127.0.0.1:8080";
  std::string snapshot_path;
  EmbedderConfig embedder;
  LlmClientConfig llm;
  EngineConfig engine;
  ChunkPolicy chunker;
  JudgeConfig judge;
  LogLevel log_level = LogLevel::kInfo;
};

ServiceConfig default_config();

// Parses the JSON config file; unknown keys are rejected so typos surface.
ServiceConfig load_config_file(const std::filesystem::path& path);

// NEWSRAG_BIND_ADDR, NEWSRAG_SNAPSHOT_PATH, NEWSRAG_LOG_LEVEL,
// NEWSRAG_EMBEDDER_{KIND,ENDPOINT_URL,MODEL_NAME,DIM},
// NEWSRAG_LLM_{ENDPOINT_URL,MODEL_ID,MAX_NEW_TOKENS,TEMPERATURE},
// NEWSRAG_ENGINE_{K,USE_RAG,PROMPT_CHAR_BUDGET},
// NEWSRAG_CHUNKER_{MAX_CHARS,OVERLAP_CHARS}.
void apply_env_overrides(ServiceConfig& config);

// File (when given) + env overrides in one step.
ServiceConfig resolve_config(const std::optional<std::filesystem::path>& file);

std::pair<std::string, int> split_bind_addr(const std::string& bind_addr);

}  // namespace newsrag

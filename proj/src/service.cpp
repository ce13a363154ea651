#include "newsrag/service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"
#include "newsrag/logging.hpp"
#include "newsrag/time_utc.hpp"

namespace newsrag {

using nlohmann::json;

struct QueryService::Impl {
  httplib::Server server;
};

namespace {

json error_body(const std::string& code, const std::string& message, bool retriable) {
  return json{{"error", {{"code", code}, {"message", message}, {"retriable", retriable}}}};
}

}  // namespace

QueryService::QueryService(ServiceConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {}

QueryService::~QueryService() = default;

bool QueryService::probe_endpoints() {
  try {
    embedder_->embed_text("ping");
  } catch (const std::exception& e) {
    log_warn("embedder probe failed", {{"error", e.what()}});
    return false;
  }
  try {
    chat_->complete("ping");
  } catch (const std::exception& e) {
    log_warn("llm probe failed", {{"error", e.what()}});
    return false;
  }
  return true;
}

bool QueryService::initialize() {
  if (ready_.load()) return true;

  if (!index_) {
    if (config_.snapshot_path.empty()) {
      log_error("no snapshot_path configured");
      return false;
    }
    try {
      auto loaded = std::make_shared<VectorIndex>(VectorIndex::load_snapshot(config_.snapshot_path));
      index_ = loaded;
      log_info("snapshot loaded", {{"path", config_.snapshot_path},
                                   {"chunks", std::to_string(index_->size())}});
    } catch (const std::exception& e) {
      log_error("snapshot load failed", {{"error", e.what()}});
      return false;
    }
  }
  if (!embedder_) embedder_ = make_embedder(config_.embedder);
  if (!chat_) chat_ = std::make_shared<HttpChatClient>(config_.llm);
  if (!engine_) engine_ = std::make_unique<RagEngine>(index_, embedder_, chat_);

  if (!probe_endpoints()) return false;
  ready_.store(true);
  return true;
}

QueryService::HttpReply QueryService::handle_health() {
  // Re-probe while not ready so a late-starting endpoint flips us to ready.
  if (!ready_.load() && !initialize()) {
    return {503, json{{"status", "starting"}}.dump()};
  }
  return {200, json{{"status", "ready"}}.dump()};
}

QueryService::HttpReply QueryService::handle_query(const std::string& request_body) {
  if (!ready_.load()) {
    return {503, error_body("NOT_READY", "service is still starting", true).dump()};
  }

  json request;
  try {
    request = json::parse(request_body);
  } catch (const json::exception&) {
    return {400, error_body("BAD_REQUEST", "body is not valid JSON", false).dump()};
  }
  if (!request.contains("question") || !request.at("question").is_string()) {
    return {400, error_body("EMPTY_QUESTION", "\"question\" field is required", false).dump()};
  }

  EngineConfig engine_config = config_.engine;
  try {
    if (request.contains("k")) engine_config.k = request.at("k").get<std::size_t>();
    if (request.contains("use_rag")) engine_config.use_rag = request.at("use_rag").get<bool>();
    if (request.contains("language")) {
      engine_config.filter.language = request.at("language").get<std::string>();
    }
  } catch (const json::exception& e) {
    return {400, error_body("BAD_REQUEST", e.what(), false).dump()};
  }

  try {
    const Answer answer = engine_->answer(request.at("question").get<std::string>(), engine_config);

    json sources = json::array();
    for (const SearchHit& hit : answer.sources) {
      const auto chunk = index_->find_chunk(hit.chunk_id);
      sources.push_back({
          {"chunk_id", hit.chunk_id},
          {"recording_id", chunk->metadata.recording_id},
          {"start_time", format_utc(chunk->metadata.start_time)},
          {"end_time", format_utc(chunk->metadata.end_time)},
          {"score", hit.score},
      });
    }
    const json body = {
        {"answer", answer.text},
        {"sources", sources},
        {"model_id", answer.model_id},
        {"template_version", answer.template_version},
    };
    return {200, body.dump()};
  } catch (const EndpointError& e) {
    return {503, error_body(error_code_name(e.code()), e.what(), e.retriable()).dump()};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyQuestion) {
      return {400, error_body(error_code_name(e.code()), e.what(), false).dump()};
    }
    if (e.code() == ErrorCode::IndexEmpty) {
      return {503, error_body(error_code_name(e.code()), e.what(), false).dump()};
    }
    return {400, error_body(error_code_name(e.code()), e.what(), false).dump()};
  }
}

void QueryService::run() {
  auto& server = impl_->server;

  server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    const HttpReply reply = handle_health();
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server.Post("/v1/query", [this](const httplib::Request& req, httplib::Response& res) {
    const HttpReply reply = handle_query(req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server.Post("/v1/ingest", [](const httplib::Request&, httplib::Response& res) {
    res.status = 501;
    res.set_content(
        error_body("NOT_IMPLEMENTED", "ingestion is an offline CLI stage in v1", false).dump(),
        "application/json");
  });

  const auto [host, port] = split_bind_addr(config_.bind_addr);
  log_info("serving", {{"addr", config_.bind_addr}});
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::IoError, "failed to bind " + config_.bind_addr);
  }
}

void QueryService::stop() { impl_->server.stop(); }

}  // namespace newsrag

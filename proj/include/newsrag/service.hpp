#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "newsrag/config.hpp"
#include "newsrag/rag_engine.hpp"

namespace newsrag {

// Read-only query service over a loaded snapshot. Endpoints:
//   GET  /healthz    -> 200 once the snapshot is loaded and both endpoints
//                       pass a probe, 503 before that
//   POST /v1/query   -> {"answer", "sources", "model_id", "template_version"}
//   POST /v1/ingest  -> 501 (ingestion is an offline CLI stage in v1)
class QueryService {
 public:
  explicit QueryService(ServiceConfig config);
  ~QueryService();

  // Loads the snapshot and probes the embedder and LLM endpoints; readiness
  // latches true on success. Returns readiness.
  bool initialize();

  // Blocks serving on config.bind_addr until stop() is called.
  void run();
  void stop();

  bool ready() const { return ready_.load(); }

  // Request handling without a socket, used by tests and by run().
  struct HttpReply {
    int status = 0;
    std::string body;  // JSON
  };
  HttpReply handle_query(const std::string& request_body);
  HttpReply handle_health();

 private:
  bool probe_endpoints();

  ServiceConfig config_;
  std::shared_ptr<const VectorIndex> index_;
  std::shared_ptr<Embedder> embedder_;
  std::shared_ptr<ChatClient> chat_;
  std::unique_ptr<RagEngine> engine_;
  std::atomic<bool> ready_{false};

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace newsrag

#include "newsrag/llm_client.hpp"

#include <nlohmann/json.hpp>

#include "newsrag/error.hpp"
#include "newsrag/http_client.hpp"

namespace newsrag {

using nlohmann::json;

HttpChatClient::HttpChatClient(LlmClientConfig config) : config_(std::move(config)) {
  parse_http_endpoint(config_.endpoint_url);  // fail fast on malformed URLs
}

std::string HttpChatClient::complete(const std::string& prompt) {
  if (prompt.empty()) {
    throw Error(ErrorCode::EmptyInput, "prompt must be non-empty");
  }
  const json body = {
      {"model", config_.model_id},
      {"prompt", prompt},
      {"max_new_tokens", config_.max_new_tokens},
      {"temperature", config_.temperature},
  };
  const HttpResponse response =
      post_json_with_retry(parse_http_endpoint(config_.endpoint_url), "/chat", body.dump(),
                           config_.timeout_ms, config_.max_retries, config_.retry_base_ms);
  try {
    return json::parse(response.body).at("text").get<std::string>();
  } catch (const json::exception&) {
    throw EndpointError(response.status, true, "chat endpoint returned malformed JSON");
  }
}

}  // namespace newsrag

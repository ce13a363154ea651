#pragma once

#include <string>

namespace newsrag {

struct LlmClientConfig {
  std::string endpoint_url;
  std::string model_id;
  int max_new_tokens = 512;
  double temperature = 0.0;  // keep 0 for evaluation runs
  int timeout_ms = 30000;
  int max_retries = 3;
  int retry_base_ms = 100;

  bool operator==(const LlmClientConfig&) const = default;
};

// Single-turn completion surface; the engine and generators depend on this,
// not on a model runtime.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
  virtual const std::string& model_id() const = 0;
};

// POST {endpoint_url}/chat
//   {"model": str, "prompt": str, "max_new_tokens": int, "temperature": num}
//   -> {"text": str}
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(LlmClientConfig config);

  std::string complete(const std::string& prompt) override;
  const std::string& model_id() const override { return config_.model_id; }
  const LlmClientConfig& config() const { return config_; }

 private:
  LlmClientConfig config_;
};

}  // namespace newsrag

#include "newsrag/http_client.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "newsrag/error.hpp"
#include "newsrag/logging.hpp"

namespace newsrag {

HttpEndpoint parse_http_endpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw Error(ErrorCode::InvalidConfig, "endpoint URL must start with http://: \"" + std::string(url) + "\"");
  }
  std::string_view rest = url.substr(kScheme.size());

  HttpEndpoint ep;
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) {
    std::string_view path = rest.substr(slash);
    while (!path.empty() && path.back() == '/') path.remove_suffix(1);
    ep.base_path = std::string(path);
  }

  const auto colon = authority.rfind(':');
  if (colon == std::string_view::npos) {
    ep.host = std::string(authority);
  } else {
    ep.host = std::string(authority.substr(0, colon));
    std::string_view port = authority.substr(colon + 1);
    int value = 0;
    for (char c : port) {
      if (c < '0' || c > '9') value = -1;
      if (value < 0) break;
      value = value * 10 + (c - '0');
    }
    if (port.empty() || value <= 0 || value > 65535) {
      throw Error(ErrorCode::InvalidConfig, "bad port in endpoint URL: \"" + std::string(url) + "\"");
    }
    ep.port = value;
  }
  if (ep.host.empty()) {
    throw Error(ErrorCode::InvalidConfig, "missing host in endpoint URL: \"" + std::string(url) + "\"");
  }
  return ep;
}

bool is_retriable_status(int status) {
  return status == 429 || (status >= 500 && status <= 599);
}

HttpResponse post_json_with_retry(const HttpEndpoint& endpoint, const std::string& path,
                                  const std::string& body, int timeout_ms, int max_retries,
                                  int base_delay_ms) {
  const std::string full_path = endpoint.base_path + path;
  int last_status = 0;
  std::string last_detail = "no response";

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    if (attempt > 0) {
      const int delay = base_delay_ms << (attempt - 1);
      log_debug("retrying endpoint call", {{"path", full_path}, {"attempt", std::to_string(attempt)}});
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }

    httplib::Client client(endpoint.host, endpoint.port);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(timeout_ms / 1000, timeout_ms % 1000 * 1000);
    client.set_write_timeout(timeout_ms / 1000, timeout_ms % 1000 * 1000);

    auto res = client.Post(full_path, body, "application/json");
    if (!res) {
      last_status = 0;
      last_detail = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      return HttpResponse{res->status, res->body};
    }
    last_status = res->status;
    last_detail = "HTTP " + std::to_string(res->status) + " from " + full_path;
    if (!is_retriable_status(res->status)) {
      throw EndpointError(res->status, false, last_detail);
    }
  }
  // Transport failures count as retriable: the endpoint may come back.
  throw EndpointError(last_status, true, last_detail + " (retries exhausted)");
}

}  // namespace newsrag

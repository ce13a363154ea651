#pragma once

#include <string>
#include <string_view>

namespace newsrag {

// "http://host:port[/base/path]" broken into client pieces. Only plain http
// is supported; inference endpoints in this stack sit on the local network.
struct HttpEndpoint {
  std::string host;
  int port = 80;
  std::string base_path;  // no trailing slash; may be empty
};

HttpEndpoint parse_http_endpoint(std::string_view url);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// POSTs a JSON body, retrying on transport errors, 429 and 5xx with
// exponential backoff (base_delay_ms * 2^attempt). Returns the final
// response; throws EndpointError when the endpoint stays unavailable or
// replies with a non-retriable error status.
HttpResponse post_json_with_retry(const HttpEndpoint& endpoint, const std::string& path,
                                  const std::string& body, int timeout_ms, int max_retries,
                                  int base_delay_ms);

bool is_retriable_status(int status);

}  // namespace newsrag

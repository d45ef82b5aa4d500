#pragma once

#include "odibench/backend/backend.hpp"

namespace odibench::backend {

struct HttpEndpoint {
  std::string base_url;                      // e.g. http://localhost:8080
  std::string path = "/v1/chat/completions";
  std::string api_key_env;                   // env var holding the credential

  int max_attempts = 5;
  int retry_base_ms = 1000;
  double retry_factor = 2.0;
  std::uint64_t jitter_seed = 0;             // backoff jitter stream
  int timeout_ms = 120000;
};

// Chat-completions style JSON client. Images travel as base64 data URLs.
// Transient failures (429, 5xx, transport errors) retry with jittered
// exponential backoff; other 4xx are permanent and fail on first sight.
class HttpChatBackend : public Backend {
 public:
  explicit HttpChatBackend(HttpEndpoint endpoint);

  ModelResponse complete(const ModelRequest& req) override;
  std::string name() const override { return "http(" + endpoint_.base_url + ")"; }

 private:
  HttpEndpoint endpoint_;
  std::string api_key_;
};

// Request body in the provider wire format; exposed for tests.
std::string chat_request_body(const ModelRequest& req);

}  // namespace odibench::backend

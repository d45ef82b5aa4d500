#include "odibench/backend/http.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "odibench/backend/base64.hpp"
#include "odibench/errors.hpp"
#include "odibench/util/rng.hpp"

namespace odibench::backend {

using nlohmann::json;

std::string chat_request_body(const ModelRequest& req) {
  json body;
  body["model"] = req.model_id;
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;

  json messages = json::array();
  for (const Message& m : req.messages) {
    json content = json::array();
    for (const MessagePart& p : m.parts) {
      if (p.kind == MessagePart::Kind::text) {
        content.push_back({{"type", "text"}, {"text", p.text}});
      } else {
        std::string url = "data:" + p.media_type + ";base64," + base64_encode(p.bytes);
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
      }
    }
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", content}});
  }
  body["messages"] = messages;
  return body.dump();
}

namespace {

ModelResponse parse_chat_response(const std::string& body, std::int64_t latency_ms) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw BackendError("malformed provider payload (not JSON)");
  ModelResponse out;
  try {
    out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw BackendError("malformed provider payload (no choices[0].message.content)");
  }
  if (j.contains("usage")) {
    TokenUsage u;
    u.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    u.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
    out.usage = u;
  }
  out.latency_ms = latency_ms;
  return out;
}

bool is_transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpChatBackend::HttpChatBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.base_url.empty()) throw ConfigError("http backend needs an endpoint URL");
  if (!endpoint_.api_key_env.empty()) {
    const char* v = std::getenv(endpoint_.api_key_env.c_str());
    if (v) api_key_ = v;
  }
}

ModelResponse HttpChatBackend::complete(const ModelRequest& req) {
  req.validate();
  const std::string body = chat_request_body(req);

  httplib::Client client(endpoint_.base_url);
  client.set_connection_timeout(std::chrono::milliseconds(endpoint_.timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(endpoint_.timeout_ms));
  client.set_write_timeout(std::chrono::milliseconds(endpoint_.timeout_ms));

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  static std::atomic<std::uint64_t> jitter_counter{0};
  util::SplitMix jitter(endpoint_.jitter_seed ^ util::splitmix64(jitter_counter.fetch_add(1)));

  std::string last_error;
  const int attempts = std::max(1, endpoint_.max_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      double scale = 1.0;
      for (int i = 1; i < attempt; ++i) scale *= endpoint_.retry_factor;
      double jittered = scale * (0.5 + jitter.unit());  // 0.5x..1.5x
      auto delay = std::chrono::milliseconds(
          static_cast<std::int64_t>(endpoint_.retry_base_ms * jittered));
      std::this_thread::sleep_for(delay);
    }

    auto start = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(endpoint_.path, headers, body, "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;  // timeouts and connection failures retry
    }
    if (res->status == 200) {
      return parse_chat_response(res->body, std::max<std::int64_t>(1, elapsed));
    }
    if (is_transient_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    // Permanent client error: auth failures and other 4xx never retry.
    throw BackendError("HTTP " + std::to_string(res->status) + " from " + endpoint_.base_url +
                       endpoint_.path + " (permanent, attempt " + std::to_string(attempt + 1) +
                       ")");
  }
  throw BackendError("request failed after " + std::to_string(attempts) +
                     " attempts: " + last_error);
}

}  // namespace odibench::backend

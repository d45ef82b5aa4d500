#include "odibench/backend/mock.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"

namespace odibench::backend {

void ScriptedMockBackend::script_digest(std::string digest_hex, std::string response) {
  rules_.push_back({true, std::move(digest_hex), std::move(response)});
}

void ScriptedMockBackend::script_contains(std::string needle, std::string response) {
  rules_.push_back({false, std::move(needle), std::move(response)});
}

void ScriptedMockBackend::set_responder(
    std::function<std::optional<std::string>(const ModelRequest&)> fn) {
  responder_ = std::move(fn);
}

ModelResponse ScriptedMockBackend::complete(const ModelRequest& req) {
  req.validate();
  {
    std::scoped_lock lock(mu_);
    seen_.push_back(req);
  }

  const CacheKey key = request_digest(req);
  const std::string text = req.last_user_text();
  for (const Rule& r : rules_) {
    if (r.by_digest ? (r.key == key.hex) : (text.find(r.key) != std::string::npos)) {
      return ModelResponse{r.response, std::nullopt, 0};
    }
  }
  if (responder_) {
    if (auto out = responder_(req)) return ModelResponse{*out, std::nullopt, 0};
  }
  if (opts_.default_response) return ModelResponse{*opts_.default_response, std::nullopt, 0};
  if (opts_.strict) {
    throw BackendError("mock script miss for request digest " + key.hex);
  }
  return ModelResponse{"", std::nullopt, 0};
}

std::size_t ScriptedMockBackend::call_count() const {
  std::scoped_lock lock(mu_);
  return seen_.size();
}

std::vector<ModelRequest> ScriptedMockBackend::requests() const {
  std::scoped_lock lock(mu_);
  return seen_;
}

void ScriptedMockBackend::reset_recording() {
  std::scoped_lock lock(mu_);
  seen_.clear();
}

std::shared_ptr<ScriptedMockBackend> ScriptedMockBackend::from_script_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock script " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("malformed mock script " + path);

  Options opts;
  opts.strict = j.value("strict", false);
  if (j.contains("default")) opts.default_response = j.at("default").get<std::string>();
  auto backend = std::make_shared<ScriptedMockBackend>(opts);

  for (const auto& rule : j.value("rules", nlohmann::json::array())) {
    if (rule.contains("digest")) {
      backend->script_digest(rule.at("digest").get<std::string>(),
                             rule.at("response").get<std::string>());
    } else if (rule.contains("contains")) {
      backend->script_contains(rule.at("contains").get<std::string>(),
                               rule.at("response").get<std::string>());
    } else {
      throw ConfigError("mock rule needs a 'digest' or 'contains' key in " + path);
    }
  }
  return backend;
}

}  // namespace odibench::backend

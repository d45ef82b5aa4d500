#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "odibench/backend/backend.hpp"

namespace odibench::backend {

// Deterministic scripted backend. Rules are tried in order: exact request
// digest, then substring match against the last user turn's text, then a
// responder callback, then the default. In strict mode an unmatched request
// is an error naming its digest.
//
// Every request is recorded, which is what the pipeline call-ledger tests
// lean on.
class ScriptedMockBackend : public Backend {
 public:
  struct Options {
    bool strict = false;
    std::optional<std::string> default_response;
  };

  ScriptedMockBackend() = default;
  explicit ScriptedMockBackend(Options opts) : opts_(std::move(opts)) {}

  void script_digest(std::string digest_hex, std::string response);
  void script_contains(std::string needle, std::string response);
  void set_responder(std::function<std::optional<std::string>(const ModelRequest&)> fn);

  ModelResponse complete(const ModelRequest& req) override;
  std::string name() const override { return "mock"; }

  std::size_t call_count() const;
  std::vector<ModelRequest> requests() const;
  void reset_recording();

  // Parses a script file: {"strict": bool, "default": str,
  //   "rules": [{"contains"|"digest": str, "response": str}, ...]}
  static std::shared_ptr<ScriptedMockBackend> from_script_file(const std::string& path);

 private:
  struct Rule {
    bool by_digest = false;
    std::string key;
    std::string response;
  };

  Options opts_;
  std::vector<Rule> rules_;
  std::function<std::optional<std::string>(const ModelRequest&)> responder_;

  mutable std::mutex mu_;
  std::vector<ModelRequest> seen_;
};

}  // namespace odibench::backend

#pragma once

#include "odibench/backend/backend.hpp"

namespace odibench::backend {

// Chance-level answering policy. Detects the option letters offered by a
// close-format prompt ("A. ...", "B. ...") and answers with one of them,
// chosen by a seeded draw keyed on the request digest so results do not
// depend on call order.
class RandomChoiceBackend : public Backend {
 public:
  explicit RandomChoiceBackend(std::uint64_t seed) : seed_(seed) {}

  ModelResponse complete(const ModelRequest& req) override;
  std::string name() const override { return "random"; }

  // Number of options the policy would see in a prompt (2..4, default 4).
  static int detect_choice_count(const std::string& prompt);

 private:
  std::uint64_t seed_;
};

}  // namespace odibench::backend

#pragma once

#include <memory>

#include "odibench/backend/digest.hpp"
#include "odibench/backend/message.hpp"

namespace odibench::backend {

// Uniform model access. Implementations must be safe for concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual ModelResponse complete(const ModelRequest& req) = 0;
  virtual std::string name() const = 0;
};

using BackendPtr = std::shared_ptr<Backend>;

}  // namespace odibench::backend

#pragma once

#include <stdexcept>
#include <string>

namespace odibench {

// Error taxonomy. The CLI maps each category to a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, malformed config files, missing prompt templates.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem and codec failures (image decode, dataset files, ...).
class IoError : public Error {
 public:
  using Error::Error;
};

// Violated domain invariants: bad boxes, bad datasets, bad angles.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Model access failures: HTTP errors after retries, script misses.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Cache I/O problems. Deliberately not a BackendError so callers can
// tell a broken cache apart from a broken model endpoint.
class CacheError : public IoError {
 public:
  using IoError::IoError;
};

// Judge output that cannot be turned into a score.
class ScoringError : public Error {
 public:
  using Error::Error;
};

// A backend failure inside a pipeline run, tagged with the stage that hit it.
class PipelineError : public BackendError {
 public:
  PipelineError(std::string stage, const std::string& what)
      : BackendError("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace odibench

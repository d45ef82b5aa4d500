#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>

#include "odibench/backend/backend.hpp"

namespace odibench::backend {

// Persistent content-addressed response store: one JSON file per entry under
// <dir>/<first two hex chars>/<digest>.json. Writes go through a temp file
// and rename. I/O problems raise CacheError, never BackendError.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<ModelResponse> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const std::string& model_id, const ModelResponse& response);

  std::size_t entry_count() const;
  std::uintmax_t total_bytes() const;
  void clear();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const CacheKey& key) const;
  std::filesystem::path dir_;
};

// Wraps any backend with the response cache. A hit never touches the inner
// backend; concurrent misses on the same key are collapsed into a single
// inner call.
class CachedBackend : public Backend {
 public:
  CachedBackend(BackendPtr inner, std::shared_ptr<ResponseCache> cache);

  ModelResponse complete(const ModelRequest& req) override;
  std::string name() const override { return "cached(" + inner_->name() + ")"; }

  std::size_t hit_count() const;
  std::size_t miss_count() const;

 private:
  BackendPtr inner_;
  std::shared_ptr<ResponseCache> cache_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<ModelResponse>> in_flight_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace odibench::backend

#include "odibench/backend/cache.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"

namespace odibench::backend {

namespace fs = std::filesystem;
using nlohmann::json;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw CacheError("cannot create cache directory " + dir_.string());
}

fs::path ResponseCache::entry_path(const CacheKey& key) const {
  return dir_ / key.hex.substr(0, 2) / (key.hex + ".json");
}

std::optional<ModelResponse> ResponseCache::lookup(const CacheKey& key) const {
  fs::path p = entry_path(key);
  std::ifstream in(p);
  if (!in) return std::nullopt;

  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw CacheError("corrupt cache entry " + p.string());

  ModelResponse r;
  r.text = j.value("text", std::string());
  r.latency_ms = j.value("latency_ms", std::int64_t{0});
  if (j.contains("usage")) {
    TokenUsage u;
    u.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    u.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
    r.usage = u;
  }
  return r;
}

void ResponseCache::store(const CacheKey& key, const std::string& model_id,
                          const ModelResponse& response) {
  fs::path p = entry_path(key);
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) throw CacheError("cannot create cache shard " + p.parent_path().string());

  json j;
  j["digest"] = key.hex;
  j["model_id"] = model_id;
  j["text"] = response.text;
  j["latency_ms"] = response.latency_ms;
  if (response.usage) {
    j["usage"] = {{"prompt_tokens", response.usage->prompt_tokens},
                  {"completion_tokens", response.usage->completion_tokens}};
  }

  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw CacheError("cannot write cache entry " + tmp.string());
    out << j.dump();
    if (!out) throw CacheError("short write on cache entry " + tmp.string());
  }
  fs::rename(tmp, p, ec);
  if (ec) throw CacheError("cannot finalize cache entry " + p.string());
}

std::size_t ResponseCache::entry_count() const {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_)) {
    if (e.is_regular_file() && e.path().extension() == ".json") ++n;
  }
  return n;
}

std::uintmax_t ResponseCache::total_bytes() const {
  std::uintmax_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_)) {
    if (e.is_regular_file()) n += e.file_size();
  }
  return n;
}

void ResponseCache::clear() {
  for (const auto& e : fs::directory_iterator(dir_)) {
    fs::remove_all(e.path());
  }
}

CachedBackend::CachedBackend(BackendPtr inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

ModelResponse CachedBackend::complete(const ModelRequest& req) {
  const CacheKey key = request_digest(req);

  // Disk reads are safe to run concurrently; no lock on the fast path.
  if (auto cached = cache_->lookup(key)) {
    std::scoped_lock lock(mu_);
    ++hits_;
    return *cached;
  }

  std::shared_future<ModelResponse> shared;
  std::promise<ModelResponse> promise;
  bool leader = false;
  {
    std::scoped_lock lock(mu_);
    auto it = in_flight_.find(key.hex);
    if (it != in_flight_.end()) {
      shared = it->second;
    } else {
      // Re-check: a previous leader may have landed between our lookup
      // and this lock.
      if (auto cached = cache_->lookup(key)) {
        ++hits_;
        return *cached;
      }
      leader = true;
      ++misses_;
      shared = promise.get_future().share();
      in_flight_.emplace(key.hex, shared);
    }
  }
  if (!leader) return shared.get();

  try {
    ModelResponse r = inner_->complete(req);
    cache_->store(key, req.model_id, r);
    promise.set_value(r);
  } catch (...) {
    promise.set_exception(std::current_exception());
  }
  {
    std::scoped_lock lock(mu_);
    in_flight_.erase(key.hex);
  }
  return shared.get();
}

std::size_t CachedBackend::hit_count() const {
  std::scoped_lock lock(mu_);
  return hits_;
}

std::size_t CachedBackend::miss_count() const {
  std::scoped_lock lock(mu_);
  return misses_;
}

}  // namespace odibench::backend

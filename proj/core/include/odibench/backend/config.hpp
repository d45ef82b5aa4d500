#pragma once

#include <map>
#include <optional>
#include <string>

namespace odibench::backend {

// key = value text config, '#' comments. Keys: endpoint, path, model,
// api_key_env, workers, retries, retry_base_ms, timeout_ms, temperature,
// max_tokens, cache_dir.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace odibench::backend

#include "odibench/prompts/prompt_library.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "odibench/errors.hpp"

namespace odibench::prompts {

namespace fs = std::filesystem;

// Generated from assets/prompts/ at build time.
extern const std::map<std::string, std::string>& builtin_templates();

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    char c = tmpl[i];
    if (c != '{') {
      out += c;
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tmpl.size() &&
           (std::islower(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) {
      ++j;
    }
    if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
      std::string key = tmpl.substr(i + 1, j - i - 1);
      auto it = vars.find(key);
      if (it == vars.end()) {
        throw ConfigError("template placeholder {" + key + "} has no binding");
      }
      out += it->second;
      i = j + 1;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  lib.templates_ = builtin_templates();
  return lib;
}

PromptLibrary PromptLibrary::from_dir(const std::string& dir) {
  PromptLibrary lib = builtin();
  if (!fs::is_directory(dir)) throw ConfigError("prompt directory not found: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    if (!in) throw IoError("cannot read prompt " + entry.path().string());
    std::stringstream ss;
    ss << in.rdbuf();
    lib.templates_[entry.path().stem().string()] = ss.str();
  }
  return lib;
}

const std::string& PromptLibrary::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ConfigError("unknown prompt template '" + name + "'");
  return it->second;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& vars) const {
  return render_template(get(name), vars);
}

std::vector<std::string> PromptLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [k, _] : templates_) out.push_back(k);
  return out;
}

}  // namespace odibench::prompts

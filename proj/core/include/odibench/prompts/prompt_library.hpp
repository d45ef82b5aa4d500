#pragma once

#include <map>
#include <string>
#include <vector>

namespace odibench::prompts {

// Substitutes {name} placeholders. Placeholders are lowercase identifiers;
// anything else in braces passes through untouched. A placeholder with no
// binding is a ConfigError so template drift fails loudly.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& vars);

// Named prompt templates. The compiled-in set mirrors the text assets
// shipped under assets/prompts/; a directory can override any of them
// file-by-file.
class PromptLibrary {
 public:
  static PromptLibrary builtin();
  static PromptLibrary from_dir(const std::string& dir);

  const std::string& get(const std::string& name) const;
  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& vars) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::string> templates_;
};

}  // namespace odibench::prompts

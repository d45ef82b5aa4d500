#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "odibench/errors.hpp"
#include "odibench/prompts/prompt_library.hpp"

using namespace odibench;
using namespace odibench::prompts;
namespace fs = std::filesystem;

TEST_CASE("template rendering substitutes and validates placeholders") {
  CHECK(render_template("Q: {question}!", {{"question", "why"}}) == "Q: why!");
  CHECK(render_template("{a} and {a}", {{"a", "x"}}) == "x and x");
  CHECK(render_template("no placeholders", {}) == "no placeholders");
  // Non-identifier braces pass through.
  CHECK(render_template("json {\"k\": 1} stays", {}) == "json {\"k\": 1} stays");
  CHECK(render_template("{Upper} stays", {}) == "{Upper} stays");
  CHECK_THROWS_AS(render_template("{missing}", {}), ConfigError);
}

TEST_CASE("builtin library carries every pipeline template") {
  PromptLibrary lib = PromptLibrary::builtin();
  for (const char* name :
       {"answer_close", "answer_open", "zscot_close", "zscot_open", "caption",
        "vpg_answer_close", "vpg_answer_open", "grounding", "relevance", "refine_close",
        "refine_open", "judge_unique", "judge_ocr", "judge_attribute", "judge_direction",
        "forge_caption", "forge_qa", "forge_distractors"}) {
    CHECK_NOTHROW(lib.get(name));
  }
  CHECK_THROWS_AS(lib.get("nonexistent"), ConfigError);

  std::string rendered = lib.render("answer_close", {{"question", "Q?"}, {"choices", "A. x"}});
  CHECK(rendered.find("Q?") != std::string::npos);
  CHECK(rendered.find("A. x") != std::string::npos);
}

TEST_CASE("directory overrides replace builtin templates file by file") {
  fs::path dir = fs::temp_directory_path() / "odibench-prompts-test";
  fs::create_directories(dir);
  std::ofstream(dir / "caption.txt") << "custom caption for {orientation}";

  PromptLibrary lib = PromptLibrary::from_dir(dir.string());
  CHECK(lib.render("caption", {{"orientation", "left"}}) == "custom caption for left");
  CHECK_NOTHROW(lib.get("answer_close"));  // untouched builtin survives

  CHECK_THROWS_AS(PromptLibrary::from_dir((dir / "missing").string()), ConfigError);
}

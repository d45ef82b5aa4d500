#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odibench/backend/backend.hpp"
#include "odibench/data/sample.hpp"
#include "odibench/prompts/prompt_library.hpp"

namespace odibench::scoring {

// Rubric families for the LLM judge.
enum class RubricKind { unique, ocr, attribute, direction };

std::string_view to_string(RubricKind r);
RubricKind rubric_for(data::TaskKind task);

struct ScoreRecord {
  std::string sample_id;
  std::string method;
  std::string raw_response;
  std::string extracted;
  double score = 0;
  std::string rubric;
  std::optional<std::string> judge_digest;
  std::vector<std::string> flags;

  std::string to_json_line() const;
  static ScoreRecord from_json_line(const std::string& line);
};

// 1 iff the extracted token names the correct choice; unanswered scores 0.
// Accepts a choice letter, a yes/no token, or the literal answer text.
int score_close(const data::QASample& sample, const std::optional<std::string>& extracted);

struct JudgeOptions {
  std::string judge_model_id = "judge";
  double temperature = 0.0;
  int max_tokens = 256;
  // Snap judge scores to {0, 0.5, 1}. Raw judge values pass through when off.
  bool discretize = true;
};

// Grades an open-format response with the rubric for the sample's task.
// Unique/OCR/attribute rubrics parse a "Score:" line from the judge;
// direction rubrics have the judge extract the predicted orientation word
// and then score deterministically. A judge reply with no usable verdict is
// a ScoringError, never a silent zero.
ScoreRecord judge_open(backend::Backend& judge, const data::QASample& sample,
                       const std::string& response, const prompts::PromptLibrary& prompts,
                       const JudgeOptions& opts = {});

// Dispatches on the sample's format. `judge` may be null for close-only
// scoring; an open sample without a judge is a ScoringError.
ScoreRecord score_sample(const data::QASample& sample, const std::string& method,
                         const std::string& response, backend::Backend* judge,
                         const prompts::PromptLibrary& prompts, const JudgeOptions& opts = {});

// Parses the numeric verdict from a "Score:" line; requires it in [0, 1].
double parse_score_line(const std::string& judge_text);

void write_records(const std::string& path, const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> read_records(const std::string& path);

}  // namespace odibench::scoring

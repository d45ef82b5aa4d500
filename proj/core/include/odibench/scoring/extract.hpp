#pragma once

#include <optional>
#include <string>

#include "odibench/data/sample.hpp"

namespace odibench::scoring {

// Pulls the answer token out of a model response. Ordered rules, first
// match wins, all case-insensitive:
//   1. an explicit <answer>...</answer> tag (rules below re-applied inside);
//   2. "answer is X" / "answer: X" phrasings;
//   3. a lone choice letter in range: "(a)", "B", "B.", "B)";
//   4. for yes/no questions, a leading yes or no.
// Close-format matches normalize to "A".."D" or "yes"/"no"; open format
// returns the tag content or the trimmed text. No match -> nullopt.
std::optional<std::string> extract_answer(const std::string& text, data::AnswerFormat format,
                                          int n_choices);

}  // namespace odibench::scoring

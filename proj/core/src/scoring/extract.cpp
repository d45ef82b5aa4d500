#include "odibench/scoring/extract.hpp"

#include <cctype>
#include <regex>

namespace odibench::scoring {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool letter_in_range(char c, int n_choices) {
  int idx = std::toupper(static_cast<unsigned char>(c)) - 'A';
  return idx >= 0 && idx < std::max(n_choices, 1);
}

std::string normalize_letter(char c) {
  return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Rules 2..4, applied either to the whole response or to tag content.
std::optional<std::string> extract_untagged(const std::string& text, data::AnswerFormat format,
                                            int n_choices) {
  if (format == data::AnswerFormat::open) {
    std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    return t;
  }

  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;

  // Whole response is a single letter.
  if (t.size() == 1 && std::isalpha(static_cast<unsigned char>(t[0])) &&
      letter_in_range(t[0], n_choices)) {
    return normalize_letter(t[0]);
  }

  // "the answer is B" / "answer: (a)" / "final answer is yes"
  static const std::regex answer_is(R"(answer\s*(?:is|:)\s*\(?([A-Za-z0-9]+)\)?)",
                                    std::regex::icase);
  std::smatch m;
  if (std::regex_search(t, m, answer_is)) {
    std::string word = m[1].str();
    if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0])) &&
        letter_in_range(word[0], n_choices)) {
      return normalize_letter(word[0]);
    }
    std::string low = lower(word);
    if (n_choices == 2 && (low == "yes" || low == "no")) return low;
  }

  // Parenthesized letter anywhere: "(a)".
  static const std::regex parenthesized(R"(\(([A-Da-d])\))");
  if (std::regex_search(t, m, parenthesized) && letter_in_range(m[1].str()[0], n_choices)) {
    return normalize_letter(m[1].str()[0]);
  }

  // Standalone uppercase letter token: "B", "B.", "B)". Lowercase is only
  // accepted in parentheses so prose articles never match.
  static const std::regex standalone(R"((?:^|[^A-Za-z0-9])([A-D])(?:[^A-Za-z0-9]|$))");
  auto begin = std::sregex_iterator(t.begin(), t.end(), standalone);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    if (letter_in_range((*it)[1].str()[0], n_choices)) return normalize_letter((*it)[1].str()[0]);
  }

  // Leading yes/no for binary questions.
  if (n_choices == 2) {
    static const std::regex leading_yesno(R"(^\W*(yes|no)\b)", std::regex::icase);
    if (std::regex_search(t, m, leading_yesno)) return lower(m[1].str());
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_answer(const std::string& text, data::AnswerFormat format,
                                          int n_choices) {
  static const std::regex tag(R"(<answer>([\s\S]*?)</answer>)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, tag)) {
    std::string content = trim(m[1].str());
    if (content.empty()) return std::nullopt;
    if (auto inner = extract_untagged(content, format, n_choices)) return inner;
    // Tagged but not reducible to a token: surface the tag content so the
    // scorer can fall back to text comparison.
    return content;
  }
  return extract_untagged(text, format, n_choices);
}

}  // namespace odibench::scoring

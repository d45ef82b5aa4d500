#include "odibench/scoring/score.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"
#include "odibench/scoring/extract.hpp"
#include "odibench/scoring/orientation.hpp"

namespace odibench::scoring {

using nlohmann::json;

std::string_view to_string(RubricKind r) {
  switch (r) {
    case RubricKind::unique: return "unique";
    case RubricKind::ocr: return "ocr";
    case RubricKind::attribute: return "attribute";
    case RubricKind::direction: return "direction";
  }
  return "unique";
}

RubricKind rubric_for(data::TaskKind task) {
  switch (task) {
    case data::TaskKind::Counting:
    case data::TaskKind::Existence:
      return RubricKind::unique;
    case data::TaskKind::OCR:
      return RubricKind::ocr;
    case data::TaskKind::ObjectAttribute:
    case data::TaskKind::HumanAttribute:
    case data::TaskKind::OdiReasoning:
      return RubricKind::attribute;
    case data::TaskKind::EgocentricViewOrientation:
    case data::TaskKind::AllocentricViewOrientation:
    case data::TaskKind::SceneSimulation:
    case data::TaskKind::RelativeDirection:
      return RubricKind::direction;
  }
  return RubricKind::attribute;
}

std::string ScoreRecord::to_json_line() const {
  json j;
  j["sample_id"] = sample_id;
  j["method"] = method;
  j["raw_response"] = raw_response;
  j["extracted"] = extracted;
  j["score"] = score;
  j["rubric"] = rubric;
  if (judge_digest) j["judge_digest"] = *judge_digest;
  if (!flags.empty()) j["flags"] = flags;
  return j.dump();
}

ScoreRecord ScoreRecord::from_json_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError("malformed score record");
  ScoreRecord r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.method = j.value("method", std::string());
  r.raw_response = j.value("raw_response", std::string());
  r.extracted = j.value("extracted", std::string());
  r.score = j.at("score").get<double>();
  r.rubric = j.value("rubric", std::string());
  if (j.contains("judge_digest")) r.judge_digest = j.at("judge_digest").get<std::string>();
  if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
  if (r.score < 0 || r.score > 1) throw ValidationError("score outside [0, 1]");
  return r;
}

namespace {

std::string fold(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

int score_close(const data::QASample& sample, const std::optional<std::string>& extracted) {
  if (sample.format != data::AnswerFormat::close) {
    throw ValidationError("score_close called on an open-format sample");
  }
  if (!extracted || extracted->empty()) return 0;

  const std::string& tok = *extracted;
  const int n = sample.n_choices();

  if (tok.size() == 1 && std::isalpha(static_cast<unsigned char>(tok[0]))) {
    int idx = std::toupper(static_cast<unsigned char>(tok[0])) - 'A';
    if (idx >= 0 && idx < n) return idx == *sample.correct_index ? 1 : 0;
    return 0;
  }

  // yes/no or literal answer text.
  std::string low = fold(tok);
  if (fold(sample.answer) == low) return 1;
  if (sample.is_yes_no()) {
    std::string truth = fold(sample.answer);
    if ((low == "yes" || low == "no") && truth == low) return 1;
  }
  return 0;
}

double parse_score_line(const std::string& judge_text) {
  static const std::regex score_line(R"(score\s*[:=]\s*([0-9]*\.?[0-9]+))", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(judge_text, m, score_line)) {
    throw ScoringError("judge reply has no Score line: " + judge_text.substr(0, 120));
  }
  double v = std::stod(m[1].str());
  if (v < 0.0 || v > 1.0) {
    throw ScoringError("judge score outside [0, 1]: " + m[1].str());
  }
  return v;
}

namespace {

double discretize_score(double v) {
  if (v < 0.25) return 0.0;
  if (v < 0.75) return 0.5;
  return 1.0;
}

std::optional<std::string> judge_orientation_line(const std::string& text) {
  static const std::regex line(R"(orientation\s*[:=]\s*([A-Za-z\-_ ]+))", std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, line)) return m[1].str();
  return std::nullopt;
}

}  // namespace

ScoreRecord judge_open(backend::Backend& judge, const data::QASample& sample,
                       const std::string& response, const prompts::PromptLibrary& prompts,
                       const JudgeOptions& opts) {
  if (sample.format != data::AnswerFormat::open) {
    throw ValidationError("judge_open called on a close-format sample");
  }
  RubricKind rubric = rubric_for(sample.task);

  ScoreRecord rec;
  rec.sample_id = sample.id;
  rec.raw_response = response;
  rec.rubric = std::string(to_string(rubric));

  std::map<std::string, std::string> vars = {
      {"question", sample.question},
      {"answer", sample.answer},
      {"response", response},
  };
  std::string prompt_name;
  switch (rubric) {
    case RubricKind::unique: prompt_name = "judge_unique"; break;
    case RubricKind::ocr: prompt_name = "judge_ocr"; break;
    case RubricKind::attribute: prompt_name = "judge_attribute"; break;
    case RubricKind::direction:
      prompt_name = "judge_direction";
      vars.erase("answer");  // the direction judge only extracts, never grades
      break;
  }

  backend::ModelRequest req;
  req.model_id = opts.judge_model_id;
  req.temperature = opts.temperature;
  req.max_tokens = opts.max_tokens;
  backend::Message turn;
  turn.role = backend::Role::user;
  turn.parts.push_back(backend::MessagePart::make_text(prompts.render(prompt_name, vars)));
  req.messages.push_back(std::move(turn));

  rec.judge_digest = backend::request_digest(req).hex;
  backend::ModelResponse reply = judge.complete(req);

  if (rubric == RubricKind::direction) {
    std::string pred = judge_orientation_line(reply.text).value_or(reply.text);
    DirectionVerdict verdict = direction_score_text(pred, sample.answer);
    rec.extracted = pred;
    rec.score = verdict.score;
    if (verdict.unrecognized) rec.flags.push_back("unrecognized_orientation");
    return rec;
  }

  double v = parse_score_line(reply.text);
  rec.extracted = response;
  rec.score = opts.discretize ? discretize_score(v) : v;
  return rec;
}

ScoreRecord score_sample(const data::QASample& sample, const std::string& method,
                         const std::string& response, backend::Backend* judge,
                         const prompts::PromptLibrary& prompts, const JudgeOptions& opts) {
  if (sample.format == data::AnswerFormat::close) {
    ScoreRecord rec;
    rec.sample_id = sample.id;
    rec.method = method;
    rec.raw_response = response;
    rec.rubric = "accuracy";
    auto extracted = extract_answer(response, sample.format, sample.n_choices());
    rec.extracted = extracted.value_or("");
    if (!extracted) rec.flags.push_back("unanswered");
    rec.score = score_close(sample, extracted);
    return rec;
  }
  if (!judge) throw ScoringError("open-format sample '" + sample.id + "' needs a judge backend");
  ScoreRecord rec = judge_open(*judge, sample, response, prompts, opts);
  rec.method = method;
  return rec;
}

void write_records(const std::string& path, const std::vector<ScoreRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write records " + path);
  for (const ScoreRecord& r : records) out << r.to_json_line() << "\n";
  if (!out) throw IoError("short write on " + path);
}

std::vector<ScoreRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records " + path);
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(ScoreRecord::from_json_line(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace odibench::scoring

#include "odibench/forge/forge.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"
#include "odibench/io/image_io.hpp"

namespace odibench::forge {

using nlohmann::json;

bool touches_border(const MaskBitmap& mask, int edge_tolerance) {
  const int tol = std::max(0, edge_tolerance);
  if (tol == 0) return false;
  const int W = mask.width, H = mask.height;

  // Bbox shortcut: masks fully inside the safe region cannot touch.
  geom::NormalizedBox bb = mask.tight_bbox();
  int min_x = static_cast<int>(bb.x1 * W);
  int min_y = static_cast<int>(bb.y1 * H);
  int max_x = static_cast<int>(bb.x2 * W) - 1;
  int max_y = static_cast<int>(bb.y2 * H) - 1;
  if (min_x >= tol && min_y >= tol && max_x < W - tol && max_y < H - tol) return false;

  // Scan only the border band.
  for (int y = 0; y < H; ++y) {
    bool edge_row = y < tol || y >= H - tol;
    if (edge_row) {
      for (int x = 0; x < W; ++x) {
        if (mask.get(x, y)) return true;
      }
    } else {
      for (int x = 0; x < tol; ++x) {
        if (mask.get(x, y)) return true;
      }
      for (int x = W - tol; x < W; ++x) {
        if (mask.get(x, y)) return true;
      }
    }
  }
  return false;
}

std::vector<InstanceDetection> filter_cross_face(const std::vector<InstanceDetection>& dets,
                                                 int edge_tolerance) {
  std::vector<InstanceDetection> kept;
  kept.reserve(dets.size());
  for (const InstanceDetection& d : dets) {
    if (!touches_border(d.mask, edge_tolerance)) kept.push_back(d);
  }
  return kept;
}

namespace {

std::string fold_token(std::string token) {
  for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return token;
}

// Lightweight singular/plural normalization: two tokens match when any of
// their candidate stems coincide (bicycles/bicycle, boxes/box, berries/berry).
std::vector<std::string> stem_forms(const std::string& token) {
  std::vector<std::string> forms = {token};
  std::size_t n = token.size();
  if (n > 3 && token.compare(n - 3, 3, "ies") == 0) forms.push_back(token.substr(0, n - 3) + "y");
  if (n > 2 && token.compare(n - 2, 2, "es") == 0) forms.push_back(token.substr(0, n - 2));
  if (n > 1 && token.back() == 's') forms.push_back(token.substr(0, n - 1));
  return forms;
}

bool tokens_match(const std::string& a, const std::string& b) {
  for (const std::string& fa : stem_forms(a)) {
    for (const std::string& fb : stem_forms(b)) {
      if (fa == fb) return true;
    }
  }
  return false;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

}  // namespace

bool consistency_check(const std::string& label, const std::string& caption) {
  std::vector<std::string> want = tokenize(label);
  if (want.empty()) return false;
  std::vector<std::string> have = tokenize(caption);

  std::size_t next = 0;
  for (const std::string& token : have) {
    if (tokens_match(token, want[next])) {
      if (++next == want.size()) return true;
    }
  }
  return false;
}

std::string CandidateQA::to_json_line() const {
  json j;
  j["instance_ref"] = instance_ref;
  j["caption"] = caption;
  j["question"] = question;
  j["answer"] = answer;
  j["distractors"] = distractors;
  j["review_flags"] = std::vector<std::string>(review_flags.begin(), review_flags.end());
  return j.dump();
}

CandidateQA CandidateQA::from_json_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError("malformed candidate record");
  CandidateQA c;
  c.instance_ref = j.value("instance_ref", std::string());
  c.caption = j.value("caption", std::string());
  c.question = j.at("question").get<std::string>();
  c.answer = j.at("answer").get<std::string>();
  if (j.contains("distractors"))
    c.distractors = j.at("distractors").get<std::vector<std::string>>();
  if (j.contains("review_flags")) {
    for (const auto& f : j.at("review_flags")) c.review_flags.insert(f.get<std::string>());
  }
  return c;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_bullet(const std::string& line) {
  static const char* digits = "0123456789";
  std::string t = trim(line);
  // "1. option" / "2) option" / "- option"
  if (!t.empty() && (t[0] == '-' || t[0] == '*')) return trim(t.substr(1));
  std::size_t d = t.find_first_not_of(digits);
  if (d > 0 && d != std::string::npos && (t[d] == '.' || t[d] == ')')) {
    return trim(t.substr(d + 1));
  }
  return t;
}

std::vector<std::string> parse_option_lines(const std::string& text) {
  // Prefer a JSON list of strings when one is present.
  std::size_t open = text.find('[');
  if (open != std::string::npos) {
    std::size_t close = text.find(']', open);
    if (close != std::string::npos) {
      json j = json::parse(text.substr(open, close - open + 1), nullptr, false);
      if (!j.is_discarded() && j.is_array()) {
        std::vector<std::string> out;
        bool all_strings = true;
        for (const auto& v : j) {
          if (!v.is_string()) {
            all_strings = false;
            break;
          }
          out.push_back(trim(v.get<std::string>()));
        }
        if (all_strings && !out.empty()) return out;
      }
    }
  }

  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string opt = strip_bullet(line);
    if (!opt.empty()) out.push_back(opt);
  }
  return out;
}

}  // namespace

CandidateQA gen_distractors(backend::Backend& backend, CandidateQA qa, const geom::Image& image,
                            const prompts::PromptLibrary& prompts,
                            const DistractorOptions& opts) {
  if (qa.question.empty() || qa.answer.empty()) {
    throw ValidationError("candidate needs a question and an answer before distractors");
  }

  backend::ModelRequest req;
  req.model_id = opts.model_id;
  req.max_tokens = opts.max_tokens;
  backend::Message turn;
  turn.role = backend::Role::user;
  turn.parts.push_back(backend::MessagePart::make_text(prompts.render(
      "forge_distractors", {{"question", qa.question}, {"answer", qa.answer}})));
  if (!image.empty()) {
    turn.parts.push_back(backend::MessagePart::make_image(io::encode_png(image), "image/png"));
  }
  req.messages.push_back(std::move(turn));

  backend::ModelResponse res = backend.complete(req);
  std::vector<std::string> options = parse_option_lines(res.text);

  if (options.size() != 3) qa.review_flags.insert("arity");
  options.resize(std::min<std::size_t>(options.size(), 3));
  qa.distractors = options;

  std::set<std::string> seen;
  std::string answer_folded = fold_token(qa.answer);
  for (const std::string& opt : qa.distractors) {
    if (opt.empty()) qa.review_flags.insert("empty");
    if (!seen.insert(fold_token(opt)).second) qa.review_flags.insert("duplicate");
    if (fold_token(opt) == answer_folded) qa.review_flags.insert("answer_overlap");
  }
  return qa;
}

std::array<scoring::OrientationWord, 3> direction_distractors(scoring::OrientationWord truth) {
  using scoring::OrientationWord;
  if (!scoring::is_compass(truth)) {
    OrientationWord other =
        truth == OrientationWord::up ? OrientationWord::down : OrientationWord::up;
    return {other, OrientationWord::front, OrientationWord::back};
  }
  int yaw = scoring::yaw_deg(truth);
  return {scoring::word_at_yaw(yaw + 90), scoring::word_at_yaw(yaw - 90),
          scoring::word_at_yaw(yaw + 180)};
}

void export_review(const std::string& path, const std::vector<CandidateQA>& flagged) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write review export " + path);
  for (const CandidateQA& c : flagged) out << c.to_json_line() << "\n";
  if (!out) throw IoError("short write on " + path);
}

std::vector<CandidateQA> load_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open candidates " + path);
  std::vector<CandidateQA> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(CandidateQA::from_json_line(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void save_candidates(const std::vector<CandidateQA>& candidates, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write candidates " + path);
  for (const CandidateQA& c : candidates) out << c.to_json_line() << "\n";
  if (!out) throw IoError("short write on " + path);
}

data::Dataset candidates_to_dataset(const std::vector<CandidateQA>& candidates,
                                    data::TaskKind task, const std::string& image_ref,
                                    std::uint64_t seed) {
  std::vector<data::QASample> samples;
  std::size_t index = 0;
  for (const CandidateQA& c : candidates) {
    if (!c.review_flags.empty()) {
      throw ValidationError("flagged candidate cannot enter a dataset: " + c.question);
    }
    if (c.distractors.size() != 3) {
      throw ValidationError("candidate without 3 distractors: " + c.question);
    }
    data::QASample s;
    s.id = "forge-" + std::to_string(index);
    s.image_ref = image_ref;
    s.task = task;
    s.format = data::AnswerFormat::close;
    s.question = c.question;
    s.answer = c.answer;
    s.choices = std::vector<std::string>{c.answer, c.distractors[0], c.distractors[1],
                                         c.distractors[2]};
    s.correct_index = 0;
    s = data::shuffle_options(s, seed ^ index);
    samples.push_back(std::move(s));
    ++index;
  }
  return data::make_dataset(std::move(samples));
}

}  // namespace odibench::forge

#include "odibench/pipeline/runner.hpp"

#include <cctype>
#include <cstdio>
#include <regex>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"
#include "odibench/geom/cubemap.hpp"
#include "odibench/io/image_io.hpp"
#include "odibench/scoring/extract.hpp"
#include "odibench/scoring/orientation.hpp"

namespace odibench::pipeline {

using backend::Message;
using backend::MessagePart;
using backend::ModelRequest;
using backend::ModelResponse;
using backend::Role;

std::string format_choices(const data::QASample& sample) {
  std::string out;
  if (!sample.choices) return out;
  char letter = 'A';
  for (const std::string& c : *sample.choices) {
    if (!out.empty()) out += "\n";
    out += letter;
    out += ". ";
    out += c;
    ++letter;
  }
  return out;
}

std::optional<std::pair<std::string, std::string>> parse_think_answer(const std::string& text) {
  static const std::regex pair(R"(<think>([\s\S]*?)</think>\s*<answer>([\s\S]*?)</answer>)",
                               std::regex::icase);
  std::smatch m;
  if (!std::regex_search(text, m, pair)) return std::nullopt;
  return std::make_pair(m[1].str(), m[2].str());
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double clamp01(double v) { return v < 0 ? 0 : (v > 1 ? 1 : v); }

// All balanced "[...]" substrings, outermost first.
std::optional<std::string> balanced_array_at(const std::string& text, std::size_t start) {
  int depth = 0;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] == '[') ++depth;
    if (text[i] == ']') {
      --depth;
      if (depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

bool is_number_array(const nlohmann::json& j, std::size_t size) {
  if (!j.is_array() || j.size() != size) return false;
  for (const auto& v : j) {
    if (!v.is_number()) return false;
  }
  return true;
}

}  // namespace

std::vector<geom::NormalizedBox> parse_box_list(const std::string& text, int max_boxes,
                                                std::vector<std::string>* warnings) {
  auto warn = [warnings](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };

  for (std::size_t pos = text.find('['); pos != std::string::npos;
       pos = text.find('[', pos + 1)) {
    auto candidate = balanced_array_at(text, pos);
    if (!candidate) break;
    nlohmann::json j = nlohmann::json::parse(*candidate, nullptr, false);
    if (j.is_discarded() || !j.is_array()) continue;

    std::vector<nlohmann::json> raw;
    if (is_number_array(j, 4)) {
      raw.push_back(j);  // a single flat box
    } else {
      bool all_boxes = true;
      for (const auto& item : j) {
        if (!is_number_array(item, 4)) {
          all_boxes = false;
          break;
        }
      }
      if (!all_boxes) continue;  // array of something else; keep scanning
      raw.assign(j.begin(), j.end());
    }

    std::vector<geom::NormalizedBox> boxes;
    for (const auto& item : raw) {
      if (static_cast<int>(boxes.size()) >= max_boxes) {
        warn("grounding returned more than " + std::to_string(max_boxes) + " boxes; truncated");
        break;
      }
      double x1 = clamp01(item.at(0).get<double>());
      double y1 = clamp01(item.at(1).get<double>());
      double x2 = clamp01(item.at(2).get<double>());
      double y2 = clamp01(item.at(3).get<double>());
      if (!(x1 < x2 && y1 < y2)) {
        warn("dropped degenerate box");
        continue;
      }
      boxes.emplace_back(x1, y1, x2, y2);
    }
    return boxes;
  }
  warn("unparseable grounding output; proceeding without crops");
  return {};
}

std::optional<bool> parse_yes_no_token(const std::string& text) {
  std::string token;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    char c = i < text.size() ? text[i] : ' ';
    if (std::isalpha(static_cast<unsigned char>(c))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!token.empty()) {
      if (token == "yes") return true;
      if (token == "no") return false;
      token.clear();
    }
  }
  return std::nullopt;
}

PipelineRunner::PipelineRunner(backend::BackendPtr backend, prompts::PromptLibrary prompts,
                               PipelineOptions opts)
    : backend_(std::move(backend)), prompts_(std::move(prompts)), opts_(opts) {
  if (!backend_) throw ConfigError("pipeline needs a backend");
}

ModelRequest PipelineRunner::new_request() const {
  ModelRequest req;
  req.model_id = opts_.model_id;
  req.temperature = opts_.temperature;
  req.max_tokens = opts_.max_tokens;
  return req;
}

ModelResponse PipelineRunner::call(const std::string& stage, const ModelRequest& req,
                                   PipelineTrace& trace) const {
  const std::string digest = backend::request_digest(req).hex;
  try {
    ModelResponse res = backend_->complete(req);
    trace.calls.push_back({stage, digest, res.latency_ms});
    return res;
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    trace.calls.push_back({stage, digest, 0});
    throw PipelineError(stage, e.what());
  }
}

std::vector<std::uint8_t> PipelineRunner::erp_upload_png(const geom::ErpImage& erp) const {
  const geom::Image& img = erp.image();
  int limit = opts_.erp_long_edge_limit;
  if (limit > 0 && img.width > limit) {
    int w = limit;
    int h = limit / 2;
    return io::encode_png(geom::resize_bilinear(img, w, h));
  }
  return io::encode_png(img);
}

PipelineTrace PipelineRunner::direct_answer(const data::QASample& sample,
                                            const geom::ErpImage& erp) const {
  PipelineTrace trace;
  trace.sample_id = sample.id;
  trace.method = Method::direct;

  const bool close = sample.format == data::AnswerFormat::close;
  std::map<std::string, std::string> vars = {{"question", sample.question}};
  if (close) vars["choices"] = format_choices(sample);

  ModelRequest req = new_request();
  Message turn;
  turn.role = Role::user;
  turn.parts.push_back(
      MessagePart::make_text(prompts_.render(close ? "answer_close" : "answer_open", vars)));
  if (!opts_.blind) {
    turn.parts.push_back(MessagePart::make_image(erp_upload_png(erp), "image/png"));
  }
  req.messages.push_back(std::move(turn));

  ModelResponse res = call("direct", req, trace);
  trace.initial_answer = trim(res.text);
  trace.final_answer = trace.initial_answer;
  trace.check_invariants();
  return trace;
}

PipelineTrace PipelineRunner::zero_shot_cot(const data::QASample& sample,
                                            const geom::ErpImage& erp) const {
  PipelineTrace trace;
  trace.sample_id = sample.id;
  trace.method = Method::zero_shot_cot;

  const bool close = sample.format == data::AnswerFormat::close;
  std::map<std::string, std::string> vars = {{"question", sample.question}};
  if (close) vars["choices"] = format_choices(sample);

  ModelRequest req = new_request();
  Message turn;
  turn.role = Role::user;
  turn.parts.push_back(
      MessagePart::make_text(prompts_.render(close ? "zscot_close" : "zscot_open", vars)));
  turn.parts.push_back(MessagePart::make_image(erp_upload_png(erp), "image/png"));
  req.messages.push_back(std::move(turn));

  ModelResponse res = call("zscot", req, trace);

  // The tag pair wins; extraction rules cover tag-free responses.
  std::optional<std::string> answer;
  if (auto tags = parse_think_answer(res.text)) {
    answer = scoring::extract_answer(tags->second, sample.format, sample.n_choices());
    if (!answer && !trim(tags->second).empty()) answer = trim(tags->second);
  } else {
    answer = scoring::extract_answer(res.text, sample.format, sample.n_choices());
  }
  if (!answer) trace.warnings.push_back("unanswered");
  trace.initial_answer = answer.value_or("");
  trace.final_answer = trace.initial_answer;
  trace.check_invariants();
  return trace;
}

std::string PipelineRunner::captions_block(const PipelineTrace& trace) const {
  std::string out;
  for (const ViewpointCaption& c : trace.captions) {
    if (!out.empty()) out += "\n";
    out += std::string(geom::to_string(c.view)) + ": " + c.caption;
  }
  return out;
}

PipelineTrace PipelineRunner::viewpoint_guided(const data::QASample& sample,
                                               const geom::ErpImage& erp) const {
  PipelineTrace trace;
  trace.sample_id = sample.id;
  trace.method = Method::viewpoint_guided;

  auto views = geom::six_views(erp, opts_.view_fov, opts_.view_size, opts_.render_threads);
  for (geom::ViewName v : geom::kAllViews) {
    std::string word(geom::to_string(v));
    ModelRequest req = new_request();
    Message turn;
    turn.role = Role::user;
    turn.parts.push_back(
        MessagePart::make_text(prompts_.render("caption", {{"orientation", word}})));
    turn.parts.push_back(MessagePart::make_image(io::encode_png(views.at(v)), "image/png"));
    req.messages.push_back(std::move(turn));

    ModelResponse res = call("caption:" + word, req, trace);
    trace.captions.push_back({v, trim(res.text)});
  }

  const bool close = sample.format == data::AnswerFormat::close;
  std::map<std::string, std::string> vars = {{"question", sample.question},
                                             {"captions", captions_block(trace)}};
  if (close) vars["choices"] = format_choices(sample);

  // Only caption text travels with the answering call; the six view images
  // never do. The panorama rides along for visual detail.
  ModelRequest req = new_request();
  Message turn;
  turn.role = Role::user;
  turn.parts.push_back(MessagePart::make_text(
      prompts_.render(close ? "vpg_answer_close" : "vpg_answer_open", vars)));
  turn.parts.push_back(MessagePart::make_image(erp_upload_png(erp), "image/png"));
  req.messages.push_back(std::move(turn));

  ModelResponse res = call("answer", req, trace);
  trace.initial_answer = trim(res.text);
  trace.final_answer = trace.initial_answer;
  trace.check_invariants();
  return trace;
}

std::vector<geom::NormalizedBox> PipelineRunner::ground_crops(const data::QASample& sample,
                                                              const geom::ErpImage& erp,
                                                              PipelineTrace& trace) const {
  ModelRequest req = new_request();
  Message turn;
  turn.role = Role::user;
  turn.parts.push_back(MessagePart::make_text(
      prompts_.render("grounding", {{"question", sample.question},
                                    {"max_boxes", std::to_string(opts_.max_boxes)}})));
  turn.parts.push_back(MessagePart::make_image(erp_upload_png(erp), "image/png"));
  req.messages.push_back(std::move(turn));

  ModelResponse res = call("grounding", req, trace);
  return parse_box_list(res.text, opts_.max_boxes, &trace.warnings);
}

std::vector<CropCue> PipelineRunner::build_cues(
    const geom::ErpImage& erp, const std::vector<geom::NormalizedBox>& boxes) const {
  std::vector<CropCue> cues;
  cues.reserve(boxes.size());
  for (const geom::NormalizedBox& box : boxes) {
    CropCue cue;
    cue.box = box;
    cue.geometry = geom::crop_cue_geometry(box, opts_.margin);
    // Crops render from the original-resolution panorama.
    cue.crop = geom::render_crop(erp, cue.geometry, opts_.crop_size, opts_.render_threads);
    cues.push_back(std::move(cue));
  }
  return cues;
}

void PipelineRunner::refine_crops(const std::string& question, std::vector<CropCue>& cues,
                                  PipelineTrace& trace) const {
  for (std::size_t i = 0; i < cues.size(); ++i) {
    ModelRequest req = new_request();
    Message turn;
    turn.role = Role::user;
    turn.parts.push_back(
        MessagePart::make_text(prompts_.render("relevance", {{"question", question}})));
    turn.parts.push_back(MessagePart::make_image(io::encode_png(cues[i].crop), "image/png"));
    req.messages.push_back(std::move(turn));

    ModelResponse res = call("relevance:" + std::to_string(i), req, trace);
    auto verdict = parse_yes_no_token(res.text);
    if (!verdict) {
      trace.warnings.push_back("unparseable relevance verdict for crop " + std::to_string(i) +
                               "; dropping it");
    }
    cues[i].relevance = verdict.value_or(false) ? Relevance::yes : Relevance::no;
  }
}

std::string PipelineRunner::refine_response(const data::QASample& sample,
                                            const geom::ErpImage& erp,
                                            PipelineTrace& trace) const {
  std::string orientation_lines;
  std::vector<const CropCue*> surviving;
  for (const CropCue& cue : trace.cues) {
    if (cue.relevance != Relevance::yes) continue;
    surviving.push_back(&cue);
    char line[160];
    std::snprintf(line, sizeof(line), "%zu. %s (theta %.1f deg, phi %.1f deg)",
                  surviving.size(),
                  std::string(scoring::to_string(
                                  scoring::orientation_from_dir(cue.geometry.center)))
                      .c_str(),
                  cue.geometry.center.theta(), cue.geometry.center.phi());
    if (!orientation_lines.empty()) orientation_lines += "\n";
    orientation_lines += line;
  }
  if (surviving.empty()) orientation_lines = "(no crops were judged relevant)";

  const bool close = sample.format == data::AnswerFormat::close;
  std::map<std::string, std::string> vars = {{"question", sample.question},
                                             {"captions", captions_block(trace)},
                                             {"crop_orientations", orientation_lines},
                                             {"previous_answer", trace.initial_answer}};
  if (close) vars["choices"] = format_choices(sample);

  ModelRequest req = new_request();
  Message turn;
  turn.role = Role::user;
  turn.parts.push_back(MessagePart::make_text(
      prompts_.render(close ? "refine_close" : "refine_open", vars)));
  turn.parts.push_back(MessagePart::make_image(erp_upload_png(erp), "image/png"));
  for (const CropCue* cue : surviving) {
    turn.parts.push_back(MessagePart::make_image(io::encode_png(cue->crop), "image/png"));
  }
  req.messages.push_back(std::move(turn));

  ModelResponse res = call("refine", req, trace);
  return trim(res.text);
}

PipelineTrace PipelineRunner::omni_cot(const data::QASample& sample,
                                       const geom::ErpImage& erp) const {
  PipelineTrace trace = viewpoint_guided(sample, erp);
  trace.method = Method::omni_cot;

  trace.boxes_raw = ground_crops(sample, erp, trace);
  trace.cues = build_cues(erp, trace.boxes_raw);
  refine_crops(sample.question, trace.cues, trace);
  trace.final_answer = refine_response(sample, erp, trace);
  trace.check_invariants();
  return trace;
}

PipelineTrace PipelineRunner::run(Method method, const data::QASample& sample,
                                  const geom::ErpImage& erp) const {
  switch (method) {
    case Method::direct: return direct_answer(sample, erp);
    case Method::zero_shot_cot: return zero_shot_cot(sample, erp);
    case Method::viewpoint_guided: return viewpoint_guided(sample, erp);
    case Method::omni_cot: return omni_cot(sample, erp);
  }
  throw ConfigError("unknown pipeline method");
}

}  // namespace odibench::pipeline

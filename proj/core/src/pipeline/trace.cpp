#include "odibench/pipeline/trace.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"

namespace odibench::pipeline {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::direct: return "direct";
    case Method::zero_shot_cot: return "zero_shot_cot";
    case Method::viewpoint_guided: return "viewpoint_guided";
    case Method::omni_cot: return "omni_cot";
  }
  return "direct";
}

std::string_view method_cli_token(Method m) {
  switch (m) {
    case Method::direct: return "direct";
    case Method::zero_shot_cot: return "zscot";
    case Method::viewpoint_guided: return "vpg";
    case Method::omni_cot: return "omnicot";
  }
  return "direct";
}

std::optional<Method> method_from_string(std::string_view s) {
  for (Method m : {Method::direct, Method::zero_shot_cot, Method::viewpoint_guided,
                   Method::omni_cot}) {
    if (s == to_string(m) || s == method_cli_token(m)) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Relevance r) {
  switch (r) {
    case Relevance::unjudged: return "unjudged";
    case Relevance::yes: return "yes";
    case Relevance::no: return "no";
  }
  return "unjudged";
}

namespace {

Relevance relevance_from_string(std::string_view s) {
  if (s == "yes") return Relevance::yes;
  if (s == "no") return Relevance::no;
  return Relevance::unjudged;
}

json box_to_json(const geom::NormalizedBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

geom::NormalizedBox box_from_json(const json& j) {
  return geom::NormalizedBox(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
                             j.at(3).get<double>());
}

}  // namespace

void PipelineTrace::check_invariants() const {
  if (method == Method::direct || method == Method::zero_shot_cot) {
    if (!captions.empty() || !cues.empty()) {
      throw ValidationError("trace '" + sample_id + "': single-call method carries stage data");
    }
    if (initial_answer != final_answer) {
      throw ValidationError("trace '" + sample_id + "': single-call method answers diverge");
    }
  }
  if ((method == Method::viewpoint_guided || method == Method::omni_cot) &&
      captions.size() != 6) {
    throw ValidationError("trace '" + sample_id + "': expected 6 viewpoint captions, have " +
                          std::to_string(captions.size()));
  }
}

std::string PipelineTrace::to_json_line() const {
  json j;
  j["sample_id"] = sample_id;
  j["method"] = std::string(to_string(method));

  json caps = json::array();
  for (const ViewpointCaption& c : captions) {
    caps.push_back({{"view", std::string(geom::to_string(c.view))}, {"caption", c.caption}});
  }
  j["captions"] = caps;

  json boxes = json::array();
  for (const geom::NormalizedBox& b : boxes_raw) boxes.push_back(box_to_json(b));
  j["boxes_raw"] = boxes;

  json jcues = json::array();
  for (const CropCue& c : cues) {
    jcues.push_back({{"box", box_to_json(c.box)},
                     {"theta", c.geometry.center.theta()},
                     {"phi", c.geometry.center.phi()},
                     {"fov", c.geometry.fov},
                     {"margin", c.geometry.margin},
                     {"relevance", std::string(to_string(c.relevance))}});
  }
  j["cues"] = jcues;

  j["initial_answer"] = initial_answer;
  j["final_answer"] = final_answer;

  json jcalls = json::array();
  for (const CallRecord& c : calls) {
    jcalls.push_back({{"stage", c.stage}, {"digest", c.digest}, {"latency_ms", c.latency_ms}});
  }
  j["calls"] = jcalls;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j.dump();
}

PipelineTrace PipelineTrace::from_json_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError("malformed trace record");

  PipelineTrace t;
  try {
    t.sample_id = j.at("sample_id").get<std::string>();
    auto m = method_from_string(j.at("method").get<std::string>());
    if (!m) throw ValidationError("unknown method in trace");
    t.method = *m;
    for (const auto& c : j.value("captions", json::array())) {
      auto view = geom::view_from_string(c.at("view").get<std::string>());
      if (!view) throw ValidationError("unknown view name in trace");
      t.captions.push_back({*view, c.at("caption").get<std::string>()});
    }
    for (const auto& b : j.value("boxes_raw", json::array())) {
      t.boxes_raw.push_back(box_from_json(b));
    }
    for (const auto& c : j.value("cues", json::array())) {
      CropCue cue;
      cue.box = box_from_json(c.at("box"));
      cue.geometry = geom::CropGeometry{
          geom::SphereDir(c.at("theta").get<double>(), c.at("phi").get<double>()),
          c.at("fov").get<double>(), c.value("margin", geom::kDefaultCropMargin)};
      cue.relevance = relevance_from_string(c.value("relevance", "unjudged"));
      t.cues.push_back(std::move(cue));
    }
    t.initial_answer = j.value("initial_answer", std::string());
    t.final_answer = j.value("final_answer", std::string());
    for (const auto& c : j.value("calls", json::array())) {
      t.calls.push_back({c.at("stage").get<std::string>(), c.at("digest").get<std::string>(),
                         c.value("latency_ms", std::int64_t{0})});
    }
    if (j.contains("warnings")) t.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad trace field: ") + e.what());
  }
  return t;
}

void write_traces(const std::string& path, const std::vector<PipelineTrace>& traces) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write traces " + path);
  for (const PipelineTrace& t : traces) out << t.to_json_line() << "\n";
  if (!out) throw IoError("short write on " + path);
}

std::vector<PipelineTrace> read_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open traces " + path);
  std::vector<PipelineTrace> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(PipelineTrace::from_json_line(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace odibench::pipeline

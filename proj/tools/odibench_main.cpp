// odibench: spherical projection utilities, benchmark evaluation runs,
// scoring/report generation, QA forging and cache administration.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "odibench/backend/cache.hpp"
#include "odibench/backend/config.hpp"
#include "odibench/backend/http.hpp"
#include "odibench/backend/mock.hpp"
#include "odibench/backend/random_policy.hpp"
#include "odibench/data/synth.hpp"
#include "odibench/errors.hpp"
#include "odibench/forge/forge.hpp"
#include "odibench/geom/cubemap.hpp"
#include "odibench/io/image_io.hpp"
#include "odibench/pipeline/eval.hpp"
#include "odibench/scoring/report.hpp"

namespace fs = std::filesystem;
using namespace odibench;

namespace {

// Exit codes: 0 success, 1 unexpected, then one per error category.
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitBackend = 4;
constexpr int kExitValidation = 5;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

struct BackendSpec {
  std::string kind = "mock";  // mock | random | http
  std::string script;
  std::string model = "eval";
  std::string endpoint;
  std::string path = "/v1/chat/completions";
  std::string api_key_env;
  int retries = 5;
  int retry_base_ms = 1000;
  int timeout_ms = 120000;
  std::uint64_t seed = 0;
  std::string cache_dir;
};

struct BuiltBackend {
  backend::BackendPtr backend;
  std::shared_ptr<backend::CachedBackend> cached;  // set when caching is on
};

BuiltBackend build_backend(const BackendSpec& spec) {
  backend::BackendPtr inner;
  if (spec.kind == "mock") {
    if (!spec.script.empty()) {
      inner = backend::ScriptedMockBackend::from_script_file(spec.script);
    } else {
      inner = std::make_shared<backend::ScriptedMockBackend>(
          backend::ScriptedMockBackend::Options{false, std::string("")});
    }
  } else if (spec.kind == "random") {
    inner = std::make_shared<backend::RandomChoiceBackend>(spec.seed);
  } else if (spec.kind == "http") {
    backend::HttpEndpoint ep;
    ep.base_url = spec.endpoint;
    ep.path = spec.path;
    ep.api_key_env = spec.api_key_env;
    ep.max_attempts = spec.retries;
    ep.retry_base_ms = spec.retry_base_ms;
    ep.timeout_ms = spec.timeout_ms;
    ep.jitter_seed = spec.seed;
    inner = std::make_shared<backend::HttpChatBackend>(ep);
  } else {
    throw ConfigError("unknown backend kind '" + spec.kind + "' (mock|random|http)");
  }

  BuiltBackend built;
  if (!spec.cache_dir.empty()) {
    auto cache = std::make_shared<backend::ResponseCache>(spec.cache_dir);
    built.cached = std::make_shared<backend::CachedBackend>(inner, cache);
    built.backend = built.cached;
  } else {
    built.backend = inner;
  }
  return built;
}

prompts::PromptLibrary load_prompts(const std::string& dir) {
  return dir.empty() ? prompts::PromptLibrary::builtin() : prompts::PromptLibrary::from_dir(dir);
}

std::vector<io::PngText> geometry_text(const geom::CropGeometry& g) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  return {{"theta", fmt(g.center.theta())},
          {"phi", fmt(g.center.phi())},
          {"fov", fmt(g.fov)},
          {"margin", fmt(g.margin)}};
}

// ---- project ----------------------------------------------------------

int cmd_project(const std::string& input, bool six, bool cube, const std::string& crop_spec,
                double margin, double fov, int size, int face_size, std::string out_dir,
                std::string out_file) {
  geom::ErpImage erp = io::load_erp(input);
  if (out_dir.empty()) out_dir = ".";
  fs::create_directories(out_dir);

  if (six) {
    auto views = geom::six_views(erp, fov, size);
    for (const auto& [name, img] : views) {
      fs::path p = fs::path(out_dir) / (std::string(geom::to_string(name)) + ".png");
      io::save_png(p.string(), img);
      std::cout << p.string() << "\n";
    }
    return 0;
  }
  if (cube) {
    auto faces = geom::cubemap(erp, face_size);
    for (const auto& [name, img] : faces) {
      fs::path p = fs::path(out_dir) / ("face_" + std::string(geom::to_string(name)) + ".png");
      io::save_png(p.string(), img);
      std::cout << p.string() << "\n";
    }
    return 0;
  }
  if (!crop_spec.empty()) {
    double x1, y1, x2, y2;
    if (std::sscanf(crop_spec.c_str(), "%lf,%lf,%lf,%lf", &x1, &y1, &x2, &y2) != 4) {
      throw ConfigError("--crop expects x1,y1,x2,y2 in normalized coordinates");
    }
    geom::CropGeometry g = geom::crop_cue_geometry(geom::NormalizedBox(x1, y1, x2, y2), margin);
    geom::Image img = geom::render_crop(erp, g, size);
    if (out_file.empty()) out_file = (fs::path(out_dir) / "crop.png").string();
    io::save_png(out_file, img, geometry_text(g));
    std::cout << out_file << " theta=" << g.center.theta() << " phi=" << g.center.phi()
              << " fov=" << g.fov << "\n";
    return 0;
  }
  throw ConfigError("project needs one of --six-views, --cubemap or --crop");
}

// ---- synth -------------------------------------------------------------

int cmd_synth(const std::string& out_dir, std::size_t samples, std::uint64_t seed, int images,
              int image_width, double open_fraction) {
  data::SynthSpec spec;
  spec.num_samples = samples;
  spec.seed = seed;
  spec.image_count = images;
  spec.image_width = image_width;
  spec.open_fraction = open_fraction;

  fs::create_directories(out_dir);
  data::Dataset ds = data::make_synth_dataset(spec);
  data::write_synth_images(spec, out_dir);
  std::string path = (fs::path(out_dir) / "dataset.jsonl").string();
  data::save_dataset(ds, path);
  std::cout << "wrote " << ds.samples.size() << " samples to " << path << "\n";
  return 0;
}

// ---- run ---------------------------------------------------------------

int cmd_run(const std::string& dataset_path, const std::string& method_token,
            const BackendSpec& spec, int workers, const std::string& prompts_dir,
            pipeline::PipelineOptions pipe_opts, const std::string& filter_task,
            const std::string& filter_format, const std::string& out_path) {
  auto method = pipeline::method_from_string(method_token);
  if (!method) {
    throw ConfigError("unknown method '" + method_token + "' (direct|zscot|vpg|omnicot)");
  }

  data::Dataset ds = data::load_dataset(dataset_path);
  if (!filter_task.empty() || !filter_format.empty()) {
    std::optional<data::TaskKind> task;
    if (!filter_task.empty()) {
      task = data::task_from_string(filter_task);
      if (!task) throw ConfigError("unknown task '" + filter_task + "'");
    }
    std::optional<data::AnswerFormat> format;
    if (!filter_format.empty()) {
      format = data::format_from_string(filter_format);
      if (!format) throw ConfigError("unknown format '" + filter_format + "' (close|open)");
    }
    std::vector<data::QASample> kept;
    for (const auto& s : ds.samples) {
      if (task && s.task != *task) continue;
      if (format && s.format != *format) continue;
      kept.push_back(s);
    }
    ds = data::make_dataset(std::move(kept));
  }
  BuiltBackend built = build_backend(spec);
  prompts::PromptLibrary lib = load_prompts(prompts_dir);

  pipeline::EvalOptions opts;
  opts.method = *method;
  opts.workers = workers;
  opts.pipeline = pipe_opts;
  opts.dataset_dir = fs::path(dataset_path).parent_path().string();
  opts.interrupted = [] { return g_interrupted.load(); };
  std::atomic<std::size_t> last_tick{0};
  opts.progress = [&](std::size_t done, std::size_t total) {
    if (done == total || done >= last_tick.load() + 500) {
      last_tick.store(done);
      std::cerr << "progress: " << done << "/" << total << "\n";
    }
  };

  pipeline::EvalResult result = run_eval(ds, built.backend, lib, opts);
  pipeline::write_traces(out_path, result.traces);

  std::size_t calls = 0;
  for (const auto& t : result.traces) calls += t.calls.size();
  std::cout << "samples: " << result.traces.size() << "/" << ds.samples.size() << "\n";
  std::cout << "backend calls: " << calls << "\n";
  if (built.cached) {
    std::cout << "cache hits: " << built.cached->hit_count()
              << "\ncache misses: " << built.cached->miss_count() << "\n";
  }
  std::cout << "hard failures: " << result.hard_failures << "\n";
  std::cout << "traces: " << out_path << "\n";

  if (g_interrupted.load()) return kExitInterrupted;
  return result.hard_failures == 0 ? 0 : kExitBackend;
}

// ---- score / report ----------------------------------------------------

int cmd_score(const std::string& traces_path, const std::string& dataset_path,
              const BackendSpec& judge_spec, bool have_judge, const std::string& prompts_dir,
              bool fine_grained, const std::string& out_path) {
  data::Dataset ds = data::load_dataset(dataset_path);
  auto traces = pipeline::read_traces(traces_path);
  prompts::PromptLibrary lib = load_prompts(prompts_dir);

  BuiltBackend judge;
  if (have_judge) judge = build_backend(judge_spec);

  scoring::JudgeOptions jopts;
  jopts.judge_model_id = judge_spec.model;
  jopts.discretize = !fine_grained;

  auto records =
      pipeline::score_traces(ds, traces, judge.backend ? judge.backend.get() : nullptr, lib,
                             jopts);
  scoring::write_records(out_path, records);
  std::cout << "scored " << records.size() << " records -> " << out_path << "\n";
  return 0;
}

int cmd_report(const std::string& records_path, const std::string& dataset_path,
               const std::string& label, const std::string& out_base) {
  data::Dataset ds = data::load_dataset(dataset_path);
  auto records = scoring::read_records(records_path);

  std::map<std::string, data::AnswerFormat> format_of;
  for (const auto& s : ds.samples) format_of[s.id] = s.format;

  std::vector<scoring::ScoreRecord> close_records, open_records;
  for (auto& r : records) {
    auto it = format_of.find(r.sample_id);
    if (it == format_of.end()) {
      throw ValidationError("record references unknown sample id '" + r.sample_id + "'");
    }
    (it->second == data::AnswerFormat::close ? close_records : open_records).push_back(r);
  }

  std::string tsv, table;
  auto add_section = [&](const std::string& name,
                         const std::vector<scoring::ScoreRecord>& recs) {
    if (recs.empty()) return;
    scoring::BenchReport rep = scoring::aggregate(recs, ds);
    tsv += scoring::render_tsv(rep, label + "/" + name);
    table += "== " + name + "-ended ==\n" + scoring::render_table(rep, label) + "\n";
  };
  add_section("close", close_records);
  add_section("open", open_records);
  if (tsv.empty()) throw ValidationError("no records to report");

  std::ofstream(out_base + ".tsv") << tsv;
  std::ofstream(out_base + ".txt") << table;
  std::cout << table;
  std::cout << "report: " << out_base << ".tsv, " << out_base << ".txt\n";
  return 0;
}

// ---- forge -------------------------------------------------------------

int cmd_forge_split(const std::string& erp_path, const std::string& out_dir, int face_size) {
  geom::ErpImage erp = io::load_erp(erp_path);
  fs::create_directories(out_dir);
  auto faces = geom::cubemap(erp, face_size);
  for (const auto& [name, img] : faces) {
    fs::path p = fs::path(out_dir) / (std::string(geom::to_string(name)) + ".png");
    io::save_png(p.string(), img);
    std::cout << p.string() << "\n";
  }
  return 0;
}

int cmd_forge_filter(const std::string& in_path, const std::string& out_path,
                     int edge_tolerance) {
  auto dets = forge::load_detections(in_path);
  auto kept = forge::filter_cross_face(dets, edge_tolerance);
  forge::save_detections(kept, out_path);
  std::cout << "kept " << kept.size() << "/" << dets.size() << " detections -> " << out_path
            << "\n";
  return 0;
}

geom::Image crop_face_image(const geom::Image& face, const geom::NormalizedBox& bbox) {
  int x1 = std::max(0, static_cast<int>(bbox.x1 * face.width));
  int y1 = std::max(0, static_cast<int>(bbox.y1 * face.height));
  int x2 = std::min(face.width, static_cast<int>(bbox.x2 * face.width + 0.5));
  int y2 = std::min(face.height, static_cast<int>(bbox.y2 * face.height + 0.5));
  geom::Image out(std::max(1, x2 - x1), std::max(1, y2 - y1), face.channels);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      for (int c = 0; c < out.channels; ++c)
        out.at(x, y, c) = face.at(std::min(face.width - 1, x1 + x),
                                  std::min(face.height - 1, y1 + y), c);
  return out;
}

int cmd_forge_caption(const std::string& detections_path, const std::string& faces_dir,
                      const BackendSpec& spec, const std::string& prompts_dir,
                      const std::string& out_path) {
  auto dets = forge::load_detections(detections_path);
  BuiltBackend built = build_backend(spec);
  prompts::PromptLibrary lib = load_prompts(prompts_dir);

  std::vector<forge::CandidateQA> out;
  std::size_t index = 0;
  for (const auto& d : dets) {
    fs::path face_path = fs::path(faces_dir) / (std::string(geom::to_string(d.face)) + ".png");
    geom::Image face = io::load_image(face_path.string());
    geom::Image crop = crop_face_image(face, d.bbox);

    backend::ModelRequest req;
    req.model_id = spec.model;
    backend::Message turn;
    turn.role = backend::Role::user;
    turn.parts.push_back(backend::MessagePart::make_text(
        lib.render("forge_caption", {{"label", d.label}})));
    turn.parts.push_back(backend::MessagePart::make_image(io::encode_png(crop), "image/png"));
    req.messages.push_back(std::move(turn));

    forge::CandidateQA cand;
    cand.instance_ref = std::string(geom::to_string(d.face)) + "/" + std::to_string(index);
    cand.caption = built.backend->complete(req).text;
    if (!forge::consistency_check(d.label, cand.caption)) {
      cand.review_flags.insert("label_caption_mismatch");
    }
    // Stash the label in the question slot until the qa step writes one.
    cand.question = "";
    cand.answer = d.label;
    out.push_back(std::move(cand));
    ++index;
  }
  forge::save_candidates(out, out_path);
  std::size_t flagged = 0;
  for (const auto& c : out) flagged += c.review_flags.empty() ? 0 : 1;
  std::cout << "captioned " << out.size() << " instances (" << flagged << " flagged) -> "
            << out_path << "\n";
  return 0;
}

int cmd_forge_qa(const std::string& candidates_path, const BackendSpec& spec,
                 const std::string& prompts_dir, const std::string& out_path) {
  auto candidates = forge::load_candidates(candidates_path);
  BuiltBackend built = build_backend(spec);
  prompts::PromptLibrary lib = load_prompts(prompts_dir);

  for (auto& cand : candidates) {
    if (!cand.review_flags.empty()) continue;
    backend::ModelRequest req;
    req.model_id = spec.model;
    backend::Message turn;
    turn.role = backend::Role::user;
    turn.parts.push_back(backend::MessagePart::make_text(lib.render(
        "forge_qa", {{"label", cand.answer}, {"caption", cand.caption}})));
    req.messages.push_back(std::move(turn));

    std::string text = built.backend->complete(req).text;
    std::string question, answer;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("Question:", 0) == 0) question = line.substr(9);
      if (line.rfind("Answer:", 0) == 0) answer = line.substr(7);
    }
    auto trim = [](std::string& s) {
      std::size_t b = s.find_first_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b);
    };
    trim(question);
    trim(answer);
    if (question.empty() || answer.empty()) {
      cand.review_flags.insert("qa_parse");
    } else {
      cand.question = question;
      cand.answer = answer;
    }
  }
  forge::save_candidates(candidates, out_path);
  std::cout << "generated QA for " << candidates.size() << " candidates -> " << out_path << "\n";
  return 0;
}

int cmd_forge_distract(const std::string& candidates_path, const BackendSpec& spec,
                       const std::string& prompts_dir, const std::string& image_path,
                       bool direction_mode, const std::string& out_path) {
  auto candidates = forge::load_candidates(candidates_path);
  prompts::PromptLibrary lib = load_prompts(prompts_dir);
  geom::Image image;
  if (!image_path.empty()) image = io::load_image(image_path);

  if (direction_mode) {
    for (auto& cand : candidates) {
      auto truth = scoring::parse_orientation(cand.answer);
      if (!truth) {
        cand.review_flags.insert("not_an_orientation");
        continue;
      }
      cand.distractors.clear();
      for (scoring::OrientationWord w : forge::direction_distractors(*truth)) {
        cand.distractors.emplace_back(scoring::to_string(w));
      }
    }
  } else {
    BuiltBackend built = build_backend(spec);
    for (auto& cand : candidates) {
      if (!cand.review_flags.empty() || cand.question.empty()) continue;
      cand = forge::gen_distractors(*built.backend, cand, image, lib,
                                    {spec.model, 256});
    }
  }
  forge::save_candidates(candidates, out_path);
  std::cout << "distractors for " << candidates.size() << " candidates -> " << out_path << "\n";
  return 0;
}

int cmd_forge_export(const std::string& candidates_path, const std::string& review_path,
                     const std::string& dataset_path, const std::string& task_name,
                     const std::string& image_ref, std::uint64_t seed) {
  auto candidates = forge::load_candidates(candidates_path);
  auto task = data::task_from_string(task_name);
  if (!task) throw ConfigError("unknown task '" + task_name + "'");

  std::vector<forge::CandidateQA> clean, flagged;
  for (auto& c : candidates) {
    (c.review_flags.empty() ? clean : flagged).push_back(c);
  }
  forge::export_review(review_path, flagged);
  data::Dataset ds = forge::candidates_to_dataset(clean, *task, image_ref, seed);
  data::save_dataset(ds, dataset_path);
  std::cout << "dataset: " << ds.samples.size() << " samples -> " << dataset_path << "\n";
  std::cout << "review: " << flagged.size() << " flagged -> " << review_path << "\n";
  return 0;
}

// ---- cache -------------------------------------------------------------

int cmd_cache_stats(const std::string& dir) {
  backend::ResponseCache cache{fs::path(dir)};
  std::cout << "entries: " << cache.entry_count() << "\n";
  std::cout << "bytes: " << cache.total_bytes() << "\n";
  return 0;
}

int cmd_cache_clear(const std::string& dir) {
  backend::ResponseCache cache{fs::path(dir)};
  std::size_t n = cache.entry_count();
  cache.clear();
  std::cout << "cleared " << n << " entries\n";
  return 0;
}

// Config file fills anything the command line left untouched; explicit
// flags always win.
void apply_config_file(const std::string& path, const CLI::App* cmd, BackendSpec& spec,
                       int& workers, pipeline::PipelineOptions& pipe,
                       std::string& prompts_dir) {
  if (path.empty()) return;
  auto cfg = backend::KeyValueConfig::from_file(path);
  auto untouched = [cmd](const std::string& flag) { return cmd->count(flag) == 0; };

  if (auto v = cfg.get("backend"); v && untouched("--backend")) spec.kind = *v;
  if (auto v = cfg.get("endpoint"); v && untouched("--endpoint")) spec.endpoint = *v;
  if (auto v = cfg.get("path")) spec.path = *v;
  if (auto v = cfg.get("model"); v && untouched("--model")) spec.model = *v;
  if (auto v = cfg.get("api_key_env"); v && untouched("--api-key-env")) spec.api_key_env = *v;
  if (auto v = cfg.get("script"); v && untouched("--script")) spec.script = *v;
  if (auto v = cfg.get("cache_dir"); v && untouched("--cache-dir")) spec.cache_dir = *v;
  if (untouched("--retries")) spec.retries = cfg.get_int("retries", spec.retries);
  if (untouched("--retry-base-ms")) {
    spec.retry_base_ms = cfg.get_int("retry_base_ms", spec.retry_base_ms);
  }
  spec.timeout_ms = cfg.get_int("timeout_ms", spec.timeout_ms);
  if (untouched("--workers")) workers = cfg.get_int("workers", workers);
  if (untouched("--temperature")) {
    pipe.temperature = cfg.get_double("temperature", pipe.temperature);
  }
  if (untouched("--max-tokens")) pipe.max_tokens = cfg.get_int("max_tokens", pipe.max_tokens);
  if (untouched("--margin")) pipe.margin = cfg.get_double("margin", pipe.margin);
  if (untouched("--crop-size")) pipe.crop_size = cfg.get_int("crop_size", pipe.crop_size);
  if (auto v = cfg.get("prompts"); v && untouched("--prompts")) prompts_dir = *v;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);

  CLI::App app{"omnidirectional-image benchmark toolkit"};
  app.require_subcommand(1);

  // project
  auto* project = app.add_subcommand("project", "render views, cubemaps or crops from a panorama");
  std::string p_input, p_crop, p_out_dir, p_out_file;
  bool p_six = false, p_cube = false;
  double p_margin = geom::kDefaultCropMargin, p_fov = 90.0;
  int p_size = 512, p_face = 512;
  project->add_option("input", p_input, "panorama (PNG or JPEG, 2:1)")->required();
  project->add_flag("--six-views", p_six, "write the six perspective views");
  project->add_flag("--cubemap", p_cube, "write the six cube faces");
  project->add_option("--crop", p_crop, "normalized box x1,y1,x2,y2 to crop");
  project->add_option("--margin", p_margin, "crop margin in degrees");
  project->add_option("--fov", p_fov, "view field of view in degrees");
  project->add_option("--size", p_size, "output edge in pixels");
  project->add_option("--face-size", p_face, "cubemap face edge in pixels");
  project->add_option("--out-dir", p_out_dir, "output directory");
  project->add_option("--out", p_out_file, "crop output path");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark fixture");
  std::string s_out = "synth";
  std::size_t s_samples = 100;
  std::uint64_t s_seed = 0;
  int s_images = 8, s_width = 128;
  double s_open = 0.0;
  synth->add_option("--out", s_out, "output directory");
  synth->add_option("--samples", s_samples, "number of QA samples");
  synth->add_option("--seed", s_seed, "generator seed");
  synth->add_option("--images", s_images, "distinct panoramas");
  synth->add_option("--image-width", s_width, "panorama width in pixels");
  synth->add_option("--open-fraction", s_open, "fraction of open-format samples");

  // shared backend options helper
  auto add_backend_opts = [](CLI::App* cmd, BackendSpec& spec, const std::string& prefix,
                             const std::string& kind_alias = "") {
    std::string kind_names = "--" + prefix + "backend";
    if (!kind_alias.empty()) kind_names += "," + kind_alias;
    cmd->add_option(kind_names, spec.kind, "backend kind: mock|random|http");
    cmd->add_option("--" + prefix + "script", spec.script, "mock script file");
    cmd->add_option("--" + prefix + "model", spec.model, "model id");
    cmd->add_option("--" + prefix + "endpoint", spec.endpoint, "http base URL");
    cmd->add_option("--" + prefix + "api-key-env", spec.api_key_env,
                    "environment variable holding the API key");
    cmd->add_option("--" + prefix + "retries", spec.retries, "max attempts");
    cmd->add_option("--" + prefix + "retry-base-ms", spec.retry_base_ms, "backoff base");
  };

  // run
  auto* run = app.add_subcommand("run", "evaluate a dataset with a reasoning method");
  std::string r_dataset, r_method = "direct", r_out = "traces.jsonl", r_prompts, r_config;
  std::string r_filter_task, r_filter_format;
  BackendSpec r_spec;
  pipeline::PipelineOptions r_pipe;
  int r_workers = 8;
  run->add_option("--dataset", r_dataset, "dataset JSONL")->required();
  run->add_option("--method", r_method, "direct|zscot|vpg|omnicot");
  run->add_option("--filter-task", r_filter_task, "restrict to one task kind");
  run->add_option("--format", r_filter_format, "restrict to close or open samples");
  add_backend_opts(run, r_spec, "");
  run->add_option("--cache-dir", r_spec.cache_dir, "response cache directory");
  run->add_option("--workers", r_workers, "parallel samples");
  run->add_option("--seed", r_spec.seed, "seed for seeded backends");
  run->add_option("--out", r_out, "trace output path");
  run->add_option("--config", r_config, "key=value config file");
  run->add_option("--prompts", r_prompts, "prompt template directory");
  run->add_option("--margin", r_pipe.margin, "crop margin in degrees");
  run->add_option("--crop-size", r_pipe.crop_size, "crop edge in pixels");
  run->add_option("--view-size", r_pipe.view_size, "view edge in pixels");
  run->add_option("--max-boxes", r_pipe.max_boxes, "grounding box cap");
  run->add_option("--max-tokens", r_pipe.max_tokens, "completion token cap");
  run->add_option("--temperature", r_pipe.temperature, "decoding temperature");
  run->add_option("--long-edge-limit", r_pipe.erp_long_edge_limit,
                  "downscale panoramas above this width before upload");
  run->add_flag("--blind", r_pipe.blind, "omit the panorama from direct prompts");

  // score
  auto* score = app.add_subcommand("score", "score trace files into records");
  std::string sc_traces, sc_dataset, sc_out = "records.jsonl", sc_prompts;
  BackendSpec sc_judge;
  sc_judge.model = "judge";
  bool sc_fine = false;
  score->add_option("--traces", sc_traces, "trace JSONL")->required();
  score->add_option("--dataset", sc_dataset, "dataset JSONL")->required();
  add_backend_opts(score, sc_judge, "judge-", "--judge");
  score->add_option("--cache-dir", sc_judge.cache_dir, "judge response cache");
  score->add_option("--seed", sc_judge.seed, "seed for seeded judges");
  score->add_option("--out", sc_out, "record output path");
  score->add_option("--prompts", sc_prompts, "prompt template directory");
  score->add_flag("--fine-grained", sc_fine, "keep raw judge scores (no 0/0.5/1 snapping)");

  // report
  auto* report = app.add_subcommand("report", "aggregate records into benchmark tables");
  std::string rp_records, rp_dataset, rp_label = "model", rp_out = "report";
  report->add_option("--records", rp_records, "record JSONL")->required();
  report->add_option("--dataset", rp_dataset, "dataset JSONL")->required();
  report->add_option("--label", rp_label, "row label");
  report->add_option("--out", rp_out, "output base path (.tsv/.txt)");

  // forge
  auto* forge_cmd = app.add_subcommand("forge", "automatic QA construction pipeline");
  forge_cmd->require_subcommand(1);

  auto* f_split = forge_cmd->add_subcommand("split", "cubemap-split a panorama");
  std::string fsp_erp, fsp_out = "faces";
  int fsp_size = 512;
  f_split->add_option("--erp", fsp_erp, "panorama path")->required();
  f_split->add_option("--out-dir", fsp_out, "face output directory");
  f_split->add_option("--face-size", fsp_size, "face edge in pixels");

  auto* f_filter = forge_cmd->add_subcommand("filter", "drop cross-face instances");
  std::string ff_in, ff_out = "filtered.jsonl";
  int ff_tol = 2;
  f_filter->add_option("--detections", ff_in, "detection JSONL")->required();
  f_filter->add_option("--out", ff_out, "filtered output");
  f_filter->add_option("--edge-tolerance", ff_tol, "border distance in pixels");

  auto* f_caption = forge_cmd->add_subcommand("caption", "caption instances and check labels");
  std::string fc_dets, fc_faces = "faces", fc_out = "captioned.jsonl", fc_prompts;
  BackendSpec fc_spec;
  f_caption->add_option("--detections", fc_dets, "detection JSONL")->required();
  f_caption->add_option("--faces-dir", fc_faces, "directory with face PNGs");
  add_backend_opts(f_caption, fc_spec, "");
  f_caption->add_option("--cache-dir", fc_spec.cache_dir, "response cache");
  f_caption->add_option("--prompts", fc_prompts, "prompt template directory");
  f_caption->add_option("--out", fc_out, "candidate output");

  auto* f_qa = forge_cmd->add_subcommand("qa", "generate QA pairs from captions");
  std::string fq_in, fq_out = "qa.jsonl", fq_prompts;
  BackendSpec fq_spec;
  f_qa->add_option("--candidates", fq_in, "candidate JSONL")->required();
  add_backend_opts(f_qa, fq_spec, "");
  f_qa->add_option("--cache-dir", fq_spec.cache_dir, "response cache");
  f_qa->add_option("--prompts", fq_prompts, "prompt template directory");
  f_qa->add_option("--out", fq_out, "candidate output");

  auto* f_distract = forge_cmd->add_subcommand("distract", "generate distractor options");
  std::string fd_in, fd_out = "distracted.jsonl", fd_prompts, fd_image;
  BackendSpec fd_spec;
  bool fd_direction = false;
  f_distract->add_option("--candidates", fd_in, "candidate JSONL")->required();
  add_backend_opts(f_distract, fd_spec, "");
  f_distract->add_option("--cache-dir", fd_spec.cache_dir, "response cache");
  f_distract->add_option("--prompts", fd_prompts, "prompt template directory");
  f_distract->add_option("--image", fd_image, "panorama to show the backend");
  f_distract->add_flag("--direction", fd_direction,
                       "orientation answers: use the orthogonal-word rule, no backend");
  f_distract->add_option("--out", fd_out, "candidate output");

  auto* f_export = forge_cmd->add_subcommand("export", "split candidates into dataset + review");
  std::string fe_in, fe_review = "review.jsonl", fe_dataset = "forged.jsonl";
  std::string fe_task = "ObjectAttribute", fe_image_ref = "pano.png";
  std::uint64_t fe_seed = 0;
  f_export->add_option("--candidates", fe_in, "candidate JSONL")->required();
  f_export->add_option("--review", fe_review, "review export path");
  f_export->add_option("--dataset", fe_dataset, "dataset output path");
  f_export->add_option("--task", fe_task, "task kind for the samples");
  f_export->add_option("--image-ref", fe_image_ref, "image reference for the samples");
  f_export->add_option("--seed", fe_seed, "option shuffle seed");

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "response cache administration");
  cache_cmd->require_subcommand(1);
  auto* c_stats = cache_cmd->add_subcommand("stats", "entry count and size");
  auto* c_clear = cache_cmd->add_subcommand("clear", "remove every entry");
  std::string cache_dir_stats = ".odibench-cache", cache_dir_clear = ".odibench-cache";
  c_stats->add_option("--cache-dir", cache_dir_stats, "cache directory");
  c_clear->add_option("--cache-dir", cache_dir_clear, "cache directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (project->parsed()) {
      return cmd_project(p_input, p_six, p_cube, p_crop, p_margin, p_fov, p_size, p_face,
                         p_out_dir, p_out_file);
    }
    if (synth->parsed()) {
      return cmd_synth(s_out, s_samples, s_seed, s_images, s_width, s_open);
    }
    if (run->parsed()) {
      apply_config_file(r_config, run, r_spec, r_workers, r_pipe, r_prompts);
      r_pipe.model_id = r_spec.model;
      if (r_workers < 1) throw ConfigError("workers must be >= 1");
      return cmd_run(r_dataset, r_method, r_spec, r_workers, r_prompts, r_pipe, r_filter_task,
                     r_filter_format, r_out);
    }
    if (score->parsed()) {
      bool have_judge = score->count("--judge-backend") > 0 || !sc_judge.script.empty() ||
                        !sc_judge.endpoint.empty();
      return cmd_score(sc_traces, sc_dataset, sc_judge, have_judge, sc_prompts, sc_fine, sc_out);
    }
    if (report->parsed()) {
      return cmd_report(rp_records, rp_dataset, rp_label, rp_out);
    }
    if (forge_cmd->parsed()) {
      if (f_split->parsed()) return cmd_forge_split(fsp_erp, fsp_out, fsp_size);
      if (f_filter->parsed()) return cmd_forge_filter(ff_in, ff_out, ff_tol);
      if (f_caption->parsed())
        return cmd_forge_caption(fc_dets, fc_faces, fc_spec, fc_prompts, fc_out);
      if (f_qa->parsed()) return cmd_forge_qa(fq_in, fq_spec, fq_prompts, fq_out);
      if (f_distract->parsed())
        return cmd_forge_distract(fd_in, fd_spec, fd_prompts, fd_image, fd_direction, fd_out);
      if (f_export->parsed())
        return cmd_forge_export(fe_in, fe_review, fe_dataset, fe_task, fe_image_ref, fe_seed);
    }
    if (cache_cmd->parsed()) {
      if (c_stats->parsed()) return cmd_cache_stats(cache_dir_stats);
      if (c_clear->parsed()) return cmd_cache_clear(cache_dir_clear);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CacheError& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const PipelineError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ScoringError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include <doctest.h>

#include <atomic>
#include <filesystem>

#include "odibench/backend/cache.hpp"
#include "odibench/backend/mock.hpp"
#include "odibench/data/synth.hpp"
#include "odibench/errors.hpp"
#include "odibench/io/image_io.hpp"
#include "odibench/pipeline/eval.hpp"
#include "odibench/pipeline/runner.hpp"
#include "odibench/scoring/orientation.hpp"

using namespace odibench;
using namespace odibench::pipeline;
using backend::ScriptedMockBackend;
using data::AnswerFormat;
using data::QASample;
using data::TaskKind;
namespace fs = std::filesystem;

namespace {

QASample make_sample(AnswerFormat format = AnswerFormat::close) {
  QASample s;
  s.id = "px-1";
  s.image_ref = "pano.png";
  s.task = TaskKind::ObjectAttribute;
  s.format = format;
  s.question = "What color is the marker panel?";
  if (format == AnswerFormat::close) {
    s.choices = std::vector<std::string>{"red", "green", "blue", "yellow"};
    s.correct_index = 1;
    s.answer = "green";
  } else {
    s.answer = "green";
  }
  return s;
}

geom::ErpImage small_erp() { return geom::ErpImage(geom::Image::solid(64, 32, 3, {90, 140, 90, 255})); }

// Mock scripted by prompt phrases unique to each stage template.
std::shared_ptr<ScriptedMockBackend> stage_mock() {
  auto mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("B")});
  mock->script_contains("perspective view toward your", "a gray wall with a marker");
  mock->script_contains("Identify up to", "[[0.1, 0.2, 0.3, 0.4], [0.5, 0.5, 0.8, 0.9]]");
  mock->script_contains("Is this crop relevant", "yes");
  mock->script_contains("Rethink the answer", "B");
  return mock;
}

PipelineOptions small_opts() {
  PipelineOptions opts;
  opts.view_size = 16;
  opts.crop_size = 16;
  return opts;
}

std::size_t count_stage(const PipelineTrace& trace, const std::string& prefix) {
  std::size_t n = 0;
  for (const CallRecord& c : trace.calls) {
    if (c.stage.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("choice block formatting") {
  QASample s = make_sample();
  CHECK(format_choices(s) == "A. red\nB. green\nC. blue\nD. yellow");
  QASample open = make_sample(AnswerFormat::open);
  CHECK(format_choices(open).empty());
}

TEST_CASE("think/answer tag pair parsing") {
  auto got = parse_think_answer("<think>looking around</think>\n<answer>C</answer>");
  REQUIRE(got.has_value());
  CHECK(got->first == "looking around");
  CHECK(got->second == "C");
  CHECK_FALSE(parse_think_answer("<answer>C</answer>").has_value());
  CHECK_FALSE(parse_think_answer("plain text").has_value());
}

TEST_CASE("grounding box list parser") {
  std::vector<std::string> warnings;

  auto one = parse_box_list("[[0.1,0.1,0.3,0.4]]", 4, &warnings);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == geom::NormalizedBox(0.1, 0.1, 0.3, 0.4));

  auto prose = parse_box_list(
      "Sure! The relevant regions are [[0.1, 0.2, 0.3, 0.4], [0.5, 0.5, 0.8, 0.9]] as asked.",
      4, &warnings);
  CHECK(prose.size() == 2);

  CHECK(parse_box_list("[ ]", 4, &warnings).empty());
  CHECK(warnings.empty());

  // A flat box, out-of-range values clamped, degenerate dropped.
  auto flat = parse_box_list("box: [0.2, 0.3, 0.5, 0.6]", 4, &warnings);
  CHECK(flat.size() == 1);
  auto clamped = parse_box_list("[[-0.2, 0.0, 0.5, 1.7]]", 4, &warnings);
  REQUIRE(clamped.size() == 1);
  CHECK(clamped[0] == geom::NormalizedBox(0.0, 0.0, 0.5, 1.0));
  warnings.clear();
  auto degenerate = parse_box_list("[[0.5, 0.5, 0.5, 0.9]]", 4, &warnings);
  CHECK(degenerate.empty());
  CHECK(warnings.size() == 1);

  // Truncation to the cap.
  warnings.clear();
  auto many = parse_box_list(
      "[[0,0,0.1,0.1],[0.1,0.1,0.2,0.2],[0.2,0.2,0.3,0.3],[0.3,0.3,0.4,0.4],[0.4,0.4,0.5,0.5]]",
      4, &warnings);
  CHECK(many.size() == 4);
  CHECK(warnings.size() == 1);

  // Unparseable output is an empty list plus a warning, not an error.
  warnings.clear();
  auto none = parse_box_list("I cannot find anything relevant.", 4, &warnings);
  CHECK(none.empty());
  CHECK(warnings.size() == 1);

  // A stray non-box array earlier in the text is skipped.
  auto skip = parse_box_list("ranked [1, 2] then [[0.1,0.1,0.9,0.9]]", 4, &warnings);
  CHECK(skip.size() == 1);
}

TEST_CASE("yes/no token parsing") {
  CHECK(parse_yes_no_token("yes") == true);
  CHECK(parse_yes_no_token("Yes, clearly relevant.") == true);
  CHECK(parse_yes_no_token("NO") == false);
  CHECK(parse_yes_no_token("I think no, not this one") == false);
  CHECK(parse_yes_no_token("Definitely: YES") == true);
  CHECK_FALSE(parse_yes_no_token("maybe").has_value());
  CHECK_FALSE(parse_yes_no_token("yesterday and nowhere").has_value());
}

TEST_CASE("direct answering: one call, scripted letter, ledger entry") {
  auto mock = stage_mock();
  PipelineRunner runner(mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace trace = runner.direct_answer(make_sample(), small_erp());

  CHECK(trace.final_answer == "B");
  CHECK(trace.initial_answer == "B");
  CHECK(trace.calls.size() == 1);
  CHECK(trace.calls[0].stage == "direct");
  CHECK(trace.captions.empty());
  CHECK(trace.cues.empty());
  CHECK(mock->call_count() == 1);
  CHECK(mock->requests()[0].image_part_count() == 1);
}

TEST_CASE("blind variant sends zero image parts") {
  auto mock = stage_mock();
  PipelineOptions opts = small_opts();
  opts.blind = true;
  PipelineRunner runner(mock, prompts::PromptLibrary::builtin(), opts);
  runner.direct_answer(make_sample(), small_erp());
  CHECK(mock->requests()[0].image_part_count() == 0);
}

TEST_CASE("backend failures carry the stage tag") {
  auto strict = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{true, std::nullopt});
  PipelineRunner runner(strict, prompts::PromptLibrary::builtin(), small_opts());
  try {
    runner.direct_answer(make_sample(), small_erp());
    FAIL("expected a pipeline error");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "direct");
  }
  // Omni-CoT fails fast at its first stage: one attempted call, no more.
  strict->reset_recording();
  try {
    runner.omni_cot(make_sample(), small_erp());
    FAIL("expected a pipeline error");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "caption:front");
  }
  CHECK(strict->call_count() == 1);
}

TEST_CASE("zero-shot CoT parses tags and falls back to extraction") {
  auto tag_mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("<think>hm</think><answer>C</answer>")});
  PipelineRunner runner(tag_mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace trace = runner.zero_shot_cot(make_sample(), small_erp());
  CHECK(trace.final_answer == "C");
  CHECK(trace.calls.size() == 1);
  CHECK(trace.calls[0].stage == "zscot");

  auto plain_mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("the answer is (a)")});
  PipelineRunner runner2(plain_mock, prompts::PromptLibrary::builtin(), small_opts());
  CHECK(runner2.zero_shot_cot(make_sample(), small_erp()).final_answer == "A");

  auto empty_mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("")});
  PipelineRunner runner3(empty_mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace unanswered = runner3.zero_shot_cot(make_sample(), small_erp());
  CHECK(unanswered.final_answer.empty());
  CHECK(unanswered.warnings.size() == 1);
}

TEST_CASE("viewpoint-guided answering: 7 calls, captions as text only") {
  auto mock = stage_mock();
  PipelineRunner runner(mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace trace = runner.viewpoint_guided(make_sample(), small_erp());

  CHECK(trace.calls.size() == 7);
  CHECK(count_stage(trace, "caption:") == 6);
  CHECK(count_stage(trace, "answer") == 1);
  REQUIRE(trace.captions.size() == 6);
  for (const ViewpointCaption& c : trace.captions) {
    CHECK(c.caption == "a gray wall with a marker");
  }

  // The answering request carries the captions as text, each prefixed by its
  // orientation word, and exactly one image: the panorama.
  auto requests = mock->requests();
  const backend::ModelRequest& answer_req = requests.back();
  CHECK(answer_req.image_part_count() == 1);
  std::string prompt = answer_req.last_user_text();
  for (geom::ViewName v : geom::kAllViews) {
    std::string line = std::string(geom::to_string(v)) + ": a gray wall with a marker";
    CHECK(prompt.find(line) != std::string::npos);
  }

  // Caption calls send the view image only.
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(requests[i].image_part_count() == 1);
  }
}

TEST_CASE("omni-cot call arithmetic and cue survival") {
  // Relevance verdicts: first crop yes, second no.
  auto verdict_mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("B")});
  verdict_mock->script_contains("perspective view toward your", "a gray wall");
  verdict_mock->script_contains("Identify up to", "[[0.1,0.2,0.3,0.4],[0.5,0.5,0.8,0.9]]");
  verdict_mock->set_responder([](const backend::ModelRequest& req)
                                  -> std::optional<std::string> {
    std::string text = req.last_user_text();
    if (text.find("Is this crop relevant") == std::string::npos) return std::nullopt;
    // Tell the two crops apart by their bytes: the first crop request seen
    // gets yes, every later one no.
    static std::atomic<int> relevance_calls{0};
    return relevance_calls.fetch_add(1) == 0 ? "yes" : "No, it is a distractor.";
  });

  PipelineRunner runner(verdict_mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace trace = runner.omni_cot(make_sample(), small_erp());

  // 7 (viewpoint guiding) + 1 (grounding) + G=2 (relevance) + 1 (refine).
  CHECK(trace.calls.size() == 11);
  CHECK(verdict_mock->call_count() == trace.calls.size());
  CHECK(trace.boxes_raw.size() == 2);
  REQUIRE(trace.cues.size() == 2);
  CHECK(trace.cues[0].relevance == Relevance::yes);
  CHECK(trace.cues[1].relevance == Relevance::no);
  CHECK(trace.method == Method::omni_cot);
  CHECK(trace.final_answer == "B");

  // Cue geometry always equals the formula recomputed from its box.
  for (const CropCue& cue : trace.cues) {
    geom::CropGeometry expect = geom::crop_cue_geometry(cue.box, runner.options().margin);
    CHECK(cue.geometry == expect);
  }

  // The refine request attaches the panorama plus only the surviving crop,
  // and names its orientation word.
  auto seen = verdict_mock->requests();
  const backend::ModelRequest& refine_req = seen.back();
  CHECK(refine_req.image_part_count() == 2);  // ERP + 1 surviving crop
  std::string prompt = refine_req.last_user_text();
  geom::CropGeometry g0 = geom::crop_cue_geometry(trace.cues[0].box, runner.options().margin);
  std::string word(scoring::to_string(scoring::orientation_from_dir(g0.center)));
  CHECK(prompt.find(word) != std::string::npos);
  CHECK(prompt.find("previous answer was: B") != std::string::npos);
}

TEST_CASE("omni-cot with no grounded boxes still refines") {
  auto mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("B")});
  mock->script_contains("perspective view toward your", "wall");
  mock->script_contains("Identify up to", "[]");
  PipelineRunner runner(mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace trace = runner.omni_cot(make_sample(), small_erp());

  CHECK(trace.calls.size() == 9);  // 7 + 1 + 0 + 1
  CHECK(trace.boxes_raw.empty());
  CHECK(trace.cues.empty());
  CHECK(!trace.final_answer.empty());
}

TEST_CASE("oversized panoramas are downscaled for upload, crops render from the original") {
  auto mock = stage_mock();
  PipelineOptions opts = small_opts();
  opts.erp_long_edge_limit = 64;
  PipelineRunner runner(mock, prompts::PromptLibrary::builtin(), opts);

  geom::ErpImage big(geom::Image::solid(128, 64, 3, {10, 20, 30, 255}));
  runner.direct_answer(make_sample(), big);

  auto seen = mock->requests();
  const backend::MessagePart* image_part = nullptr;
  for (const auto& part : seen[0].messages[0].parts) {
    if (part.kind == backend::MessagePart::Kind::image) image_part = &part;
  }
  REQUIRE(image_part != nullptr);
  geom::Image uploaded = io::decode_png(image_part->bytes);
  CHECK(uploaded.width == 64);
  CHECK(uploaded.height == 32);

  // Crops come from the original resolution panorama regardless.
  auto cues = runner.build_cues(big, {geom::NormalizedBox(0.3, 0.3, 0.6, 0.6)});
  REQUIRE(cues.size() == 1);
  CHECK(cues[0].crop.width == opts.crop_size);
}

TEST_CASE("identical runs produce bit-identical traces") {
  auto mock = stage_mock();
  PipelineRunner runner(mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace a = runner.omni_cot(make_sample(), small_erp());
  PipelineTrace b = runner.omni_cot(make_sample(), small_erp());
  CHECK(a.to_json_line() == b.to_json_line());
}

TEST_CASE("trace JSON round trip preserves visible fields") {
  auto mock = stage_mock();
  PipelineRunner runner(mock, prompts::PromptLibrary::builtin(), small_opts());
  PipelineTrace t = runner.omni_cot(make_sample(), small_erp());
  PipelineTrace back = PipelineTrace::from_json_line(t.to_json_line());
  CHECK(back.sample_id == t.sample_id);
  CHECK(back.method == t.method);
  CHECK(back.captions == t.captions);
  CHECK(back.boxes_raw == t.boxes_raw);
  REQUIRE(back.cues.size() == t.cues.size());
  for (std::size_t i = 0; i < t.cues.size(); ++i) {
    CHECK(back.cues[i].box == t.cues[i].box);
    CHECK(back.cues[i].geometry == t.cues[i].geometry);
    CHECK(back.cues[i].relevance == t.cues[i].relevance);
  }
  CHECK(back.final_answer == t.final_answer);
  CHECK(back.calls == t.calls);
}

TEST_CASE("trace invariants reject malformed traces") {
  PipelineTrace t;
  t.sample_id = "x";
  t.method = Method::direct;
  t.initial_answer = "A";
  t.final_answer = "B";
  CHECK_THROWS_AS(t.check_invariants(), ValidationError);

  PipelineTrace v;
  v.sample_id = "y";
  v.method = Method::omni_cot;
  v.captions.push_back({geom::ViewName::front, "only one"});
  CHECK_THROWS_AS(v.check_invariants(), ValidationError);
}

TEST_CASE("eval loop runs a synthetic dataset end to end") {
  fs::path root = fs::temp_directory_path() / "odibench-eval-test";
  fs::remove_all(root);
  fs::create_directories(root);

  data::SynthSpec spec;
  spec.num_samples = 10;
  spec.seed = 17;
  spec.image_count = 2;
  spec.image_width = 64;
  data::Dataset ds = data::make_synth_dataset(spec);
  data::write_synth_images(spec, root.string());

  auto mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("B")});

  EvalOptions opts;
  opts.method = Method::direct;
  opts.workers = 3;
  opts.dataset_dir = root.string();
  opts.pipeline = small_opts();

  EvalResult result = run_eval(ds, mock, prompts::PromptLibrary::builtin(), opts);
  CHECK(result.traces.size() == 10);
  CHECK(result.hard_failures == 0);
  CHECK(mock->call_count() == 10);
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    CHECK(result.traces[i].sample_id == ds.samples[i].id);
    CHECK(result.traces[i].calls.size() == 1);
  }

  // Scoring the traces close-format needs no judge.
  auto records = score_traces(ds, result.traces, nullptr, prompts::PromptLibrary::builtin());
  CHECK(records.size() == 10);

  // A missing panorama is a recorded per-sample failure, not a crash.
  data::Dataset broken = ds;
  broken.samples[3].image_ref = "images/missing.png";
  EvalResult partial = run_eval(broken, mock, prompts::PromptLibrary::builtin(), opts);
  CHECK(partial.hard_failures == 1);
  CHECK(partial.traces.size() == 10);
  CHECK(!partial.traces[3].warnings.empty());
}

TEST_CASE("eval reruns against a warm cache perform zero inner calls") {
  fs::path root = fs::temp_directory_path() / "odibench-eval-cache";
  fs::remove_all(root);
  fs::create_directories(root);

  data::SynthSpec spec;
  spec.num_samples = 6;
  spec.seed = 23;
  spec.image_count = 1;
  spec.image_width = 64;
  data::Dataset ds = data::make_synth_dataset(spec);
  data::write_synth_images(spec, root.string());

  auto mock = std::make_shared<ScriptedMockBackend>(
      ScriptedMockBackend::Options{false, std::string("A")});
  auto cache = std::make_shared<backend::ResponseCache>(root / "cache");
  auto cached = std::make_shared<backend::CachedBackend>(mock, cache);

  EvalOptions opts;
  opts.method = Method::direct;
  opts.dataset_dir = root.string();
  opts.pipeline = small_opts();

  EvalResult first = run_eval(ds, cached, prompts::PromptLibrary::builtin(), opts);
  std::size_t after_first = mock->call_count();
  CHECK(after_first == 6);

  EvalResult second = run_eval(ds, cached, prompts::PromptLibrary::builtin(), opts);
  CHECK(mock->call_count() == after_first);  // zero new inner calls

  // Identical traces, hence identical scores.
  REQUIRE(first.traces.size() == second.traces.size());
  for (std::size_t i = 0; i < first.traces.size(); ++i) {
    CHECK(first.traces[i].to_json_line() == second.traces[i].to_json_line());
  }
}

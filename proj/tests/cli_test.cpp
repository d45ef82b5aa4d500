// End-to-end tests driving the installed CLI binary as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "odibench/io/image_io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(ODIBENCH_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "odibench-cli-test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

void write_mock_script(const fs::path& p, const std::string& json_text) {
  std::ofstream out(p);
  out << json_text;
}

}  // namespace

TEST_CASE("synth then eval then score then report, mock backend") {
  fs::path dir = work_dir() / "flow";
  fs::create_directories(dir);

  RunResult synth = run_cli("synth --out " + q(dir / "fix") +
                            " --samples 10 --seed 3 --images 2 --image-width 64");
  REQUIRE(synth.exit_code == 0);
  CHECK(fs::exists(dir / "fix" / "dataset.jsonl"));

  write_mock_script(dir / "script.json", R"({"default": "B"})");
  RunResult run = run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                          " --method direct --backend mock --script " + q(dir / "script.json") +
                          " --out " + q(dir / "traces.jsonl"));
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("backend calls: 10") != std::string::npos);
  CHECK(count_lines(dir / "traces.jsonl") == 10);

  RunResult score = run_cli("score --traces " + q(dir / "traces.jsonl") + " --dataset " +
                            q(dir / "fix" / "dataset.jsonl") + " --out " +
                            q(dir / "records.jsonl"));
  REQUIRE(score.exit_code == 0);
  CHECK(count_lines(dir / "records.jsonl") == 10);

  RunResult report = run_cli("report --records " + q(dir / "records.jsonl") + " --dataset " +
                             q(dir / "fix" / "dataset.jsonl") + " --label mockrun --out " +
                             q(dir / "rep"));
  REQUIRE(report.exit_code == 0);
  CHECK(fs::exists(dir / "rep.tsv"));
  CHECK(fs::exists(dir / "rep.txt"));
  CHECK(report.output.find("Overall") != std::string::npos);
}

TEST_CASE("project writes six views, cubemap faces and an annotated crop") {
  fs::path dir = work_dir() / "project";
  fs::create_directories(dir);

  run_cli("synth --out " + q(dir / "fix") + " --samples 1 --images 1 --image-width 128");
  fs::path pano = dir / "fix" / "images" / "img_000.png";
  REQUIRE(fs::exists(pano));

  RunResult six = run_cli("project " + q(pano) + " --six-views --size 32 --out-dir " +
                          q(dir / "views"));
  REQUIRE(six.exit_code == 0);
  for (const char* name : {"front", "back", "left", "right", "top", "bottom"}) {
    CHECK(fs::exists(dir / "views" / (std::string(name) + ".png")));
  }

  RunResult cube = run_cli("project " + q(pano) + " --cubemap --face-size 16 --out-dir " +
                           q(dir / "faces"));
  REQUIRE(cube.exit_code == 0);
  CHECK(fs::exists(dir / "faces" / "face_front.png"));

  RunResult crop = run_cli("project " + q(pano) +
                           " --crop 0.25,0.25,0.5,0.5 --margin 10 --size 24 --out " +
                           q(dir / "crop.png"));
  REQUIRE(crop.exit_code == 0);
  auto text = odibench::io::read_png_text((dir / "crop.png").string());
  REQUIRE(text.size() == 4);
  CHECK(text[0].first == "theta");
  CHECK(std::stod(text[0].second) == doctest::Approx(-45.0));
  CHECK(text[1].first == "phi");
  CHECK(std::stod(text[1].second) == doctest::Approx(22.5));
  CHECK(text[2].first == "fov");
  CHECK(std::stod(text[2].second) == doctest::Approx(100.0));
}

TEST_CASE("non-2:1 input exits with the validation code and an aspect message") {
  fs::path dir = work_dir() / "aspect";
  fs::create_directories(dir);
  odibench::io::save_png((dir / "square.png").string(),
                         odibench::geom::Image::solid(64, 64, 3, {1, 2, 3, 255}));
  RunResult r = run_cli("project " + q(dir / "square.png") + " --six-views --out-dir " + q(dir));
  CHECK(r.exit_code == 5);
  CHECK(r.output.find("2:1") != std::string::npos);
}

TEST_CASE("distinct exit codes per failure category") {
  fs::path dir = work_dir() / "codes";
  fs::create_directories(dir);

  // Config: unknown method.
  run_cli("synth --out " + q(dir / "fix") + " --samples 2 --images 1 --image-width 64");
  RunResult config = run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                             " --method sideways --out " + q(dir / "t.jsonl"));
  CHECK(config.exit_code == 2);

  // IO: missing dataset file.
  RunResult io = run_cli("run --dataset " + q(dir / "missing.jsonl") + " --out " +
                         q(dir / "t.jsonl"));
  CHECK(io.exit_code == 3);

  // Validation: corrupt dataset record.
  std::ofstream(dir / "bad.jsonl") << "{\"id\": \"x\"}\n";
  RunResult validation = run_cli("run --dataset " + q(dir / "bad.jsonl") + " --out " +
                                 q(dir / "t.jsonl"));
  CHECK(validation.exit_code == 5);

  // Backend: strict mock with no rules fails every sample.
  write_mock_script(dir / "strict.json", R"({"strict": true})");
  RunResult backend = run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                              " --method direct --backend mock --script " +
                              q(dir / "strict.json") + " --out " + q(dir / "t.jsonl"));
  CHECK(backend.exit_code == 4);
}

TEST_CASE("omnicot over the CLI with a staged script and warm-cache rerun") {
  fs::path dir = work_dir() / "omni";
  fs::create_directories(dir);

  run_cli("synth --out " + q(dir / "fix") + " --samples 4 --seed 9 --images 1 --image-width 64");

  write_mock_script(dir / "script.json", R"({
    "default": "B",
    "rules": [
      {"contains": "perspective view toward your", "response": "a plain wall"},
      {"contains": "Identify up to", "response": "[[0.2, 0.2, 0.4, 0.5]]"},
      {"contains": "Is this crop relevant", "response": "yes"}
    ]
  })");

  std::string run_args = "run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                         " --method omnicot --backend mock --script " + q(dir / "script.json") +
                         " --cache-dir " + q(dir / "cache") + " --out " + q(dir / "traces.jsonl");

  RunResult first = run_cli(run_args);
  REQUIRE(first.exit_code == 0);
  // 7 + 1 + 1 + 1 = 10 calls per sample, 4 samples.
  CHECK(first.output.find("backend calls: 40") != std::string::npos);

  // Rerun against the warm cache: traces recompute, zero inner calls.
  RunResult second = run_cli(run_args + " --workers 2");
  REQUIRE(second.exit_code == 0);
  CHECK(second.output.find("cache misses: 0") != std::string::npos);
  CHECK(second.output.find("backend calls: 40") != std::string::npos);

  // Trace shape: omni_cot with six captions and a surviving cue.
  std::ifstream in(dir / "traces.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  nlohmann::json t = nlohmann::json::parse(line);
  CHECK(t["method"] == "omni_cot");
  CHECK(t["captions"].size() == 6);
  CHECK(t["cues"].size() == 1);
  CHECK(t["cues"][0]["relevance"] == "yes");
  CHECK(t["calls"].size() == 10);
}

TEST_CASE("run supports task and format filters") {
  fs::path dir = work_dir() / "filters";
  fs::create_directories(dir);
  run_cli("synth --out " + q(dir / "fix") +
          " --samples 40 --seed 2 --images 1 --image-width 64 --open-fraction 0.3");
  write_mock_script(dir / "script.json", R"({"default": "A"})");

  RunResult by_task = run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                              " --method direct --backend mock --script " +
                              q(dir / "script.json") + " --filter-task Counting --out " +
                              q(dir / "t1.jsonl"));
  REQUIRE(by_task.exit_code == 0);
  CHECK(count_lines(dir / "t1.jsonl") == 4);  // every 10th sample cycles Counting

  RunResult by_format = run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                                " --method direct --backend mock --script " +
                                q(dir / "script.json") + " --format open --out " +
                                q(dir / "t2.jsonl"));
  REQUIRE(by_format.exit_code == 0);
  std::size_t open_traces = count_lines(dir / "t2.jsonl");
  CHECK(open_traces > 0);
  CHECK(open_traces < 40);

  RunResult bad = run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                          " --filter-task Sideways --out " + q(dir / "t3.jsonl"));
  CHECK(bad.exit_code == 2);
}

TEST_CASE("cache admin reports and clears entries") {
  fs::path dir = work_dir() / "cacheadmin";
  fs::create_directories(dir);

  run_cli("synth --out " + q(dir / "fix") + " --samples 3 --images 1 --image-width 64");
  write_mock_script(dir / "script.json", R"({"default": "A"})");
  run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
          " --method direct --backend mock --script " + q(dir / "script.json") +
          " --cache-dir " + q(dir / "cache") + " --out " + q(dir / "t.jsonl"));

  RunResult stats = run_cli("cache stats --cache-dir " + q(dir / "cache"));
  REQUIRE(stats.exit_code == 0);
  CHECK(stats.output.find("entries: 3") != std::string::npos);

  RunResult clear = run_cli("cache clear --cache-dir " + q(dir / "cache"));
  REQUIRE(clear.exit_code == 0);
  RunResult stats2 = run_cli("cache stats --cache-dir " + q(dir / "cache"));
  CHECK(stats2.output.find("entries: 0") != std::string::npos);
}

TEST_CASE("random policy scores near chance on a 4-choice fixture") {
  fs::path dir = work_dir() / "random";
  fs::create_directories(dir);

  // Attribute tasks only: every sample is 4-choice.
  run_cli("synth --out " + q(dir / "fix") +
          " --samples 400 --seed 21 --images 2 --image-width 64");

  // Filter to 4-choice samples by scoring everything and reading the report:
  // Existence / some OR samples are yes/no, so overall lands between 25 and 50.
  RunResult run = run_cli("run --dataset " + q(dir / "fix" / "dataset.jsonl") +
                          " --method direct --backend random --seed 77 --out " +
                          q(dir / "traces.jsonl"));
  REQUIRE(run.exit_code == 0);
  RunResult score = run_cli("score --traces " + q(dir / "traces.jsonl") + " --dataset " +
                            q(dir / "fix" / "dataset.jsonl") + " --out " +
                            q(dir / "records.jsonl"));
  REQUIRE(score.exit_code == 0);

  // Per-letter outcomes are deterministic for a fixed seed; the value below
  // was observed once and is locked in as a regression anchor.
  std::ifstream in(dir / "records.jsonl");
  std::string line;
  double total = 0;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    total += nlohmann::json::parse(line)["score"].get<double>();
    ++n;
  }
  REQUIRE(n == 400);
  double mean = total / static_cast<double>(n);
  CHECK(mean > 0.18);
  CHECK(mean < 0.45);  // chance band for a 4-choice/yes-no mix
}

TEST_CASE("forge pipeline: split, filter, caption, distract, export") {
  fs::path dir = work_dir() / "forge";
  fs::create_directories(dir);

  run_cli("synth --out " + q(dir / "fix") + " --samples 1 --images 1 --image-width 128");
  fs::path pano = dir / "fix" / "images" / "img_000.png";

  RunResult split = run_cli("forge split --erp " + q(pano) + " --face-size 32 --out-dir " +
                            q(dir / "faces"));
  REQUIRE(split.exit_code == 0);
  CHECK(fs::exists(dir / "faces" / "front.png"));

  // Detections: one centered blob (kept), one touching the left edge (dropped).
  {
    std::ofstream out(dir / "dets.jsonl");
    // 8x8 face; centered 2x2 blob at (3..4, 3..4).
    out << R"({"face":"front","label":"marker panel","width":8,"height":8,)"
        << R"("mask_rle":[27,2,6,2,27],"bbox":[0.375,0.375,0.625,0.625]})" << "\n";
    // Blob with a pixel at x=0.
    out << R"({"face":"front","label":"doorway","width":8,"height":8,)"
        << R"("mask_rle":[24,2,6,2,30],"bbox":[0.0,0.375,0.25,0.625]})" << "\n";
  }
  RunResult filter = run_cli("forge filter --detections " + q(dir / "dets.jsonl") +
                             " --edge-tolerance 2 --out " + q(dir / "kept.jsonl"));
  REQUIRE(filter.exit_code == 0);
  CHECK(filter.output.find("kept 1/2") != std::string::npos);

  write_mock_script(dir / "caption.json",
                    R"({"default": "a bright marker panel mounted on the wall"})");
  RunResult caption = run_cli("forge caption --detections " + q(dir / "kept.jsonl") +
                              " --faces-dir " + q(dir / "faces") + " --backend mock --script " +
                              q(dir / "caption.json") + " --out " + q(dir / "cap.jsonl"));
  REQUIRE(caption.exit_code == 0);
  CHECK(caption.output.find("(0 flagged)") != std::string::npos);

  write_mock_script(dir / "qa.json",
                    R"({"default": "Question: What color is the marker panel ahead of me?\nAnswer: white"})");
  RunResult qa = run_cli("forge qa --candidates " + q(dir / "cap.jsonl") +
                         " --backend mock --script " + q(dir / "qa.json") + " --out " +
                         q(dir / "qa.jsonl"));
  REQUIRE(qa.exit_code == 0);

  write_mock_script(dir / "distract.json", R"({"default": "black\ngray\nsilver"})");
  RunResult distract = run_cli("forge distract --candidates " + q(dir / "qa.jsonl") +
                               " --backend mock --script " + q(dir / "distract.json") +
                               " --image " + q(pano) + " --out " + q(dir / "dis.jsonl"));
  REQUIRE(distract.exit_code == 0);

  RunResult exp = run_cli("forge export --candidates " + q(dir / "dis.jsonl") + " --review " +
                          q(dir / "review.jsonl") + " --dataset " + q(dir / "forged.jsonl") +
                          " --task ObjectAttribute --image-ref images/img_000.png --seed 5");
  REQUIRE(exp.exit_code == 0);
  CHECK(count_lines(dir / "forged.jsonl") == 2);  // manifest + 1 sample
  CHECK(count_lines(dir / "review.jsonl") == 0);

  // The forged dataset loads and validates.
  RunResult rerun = run_cli("run --dataset " + q(dir / "forged.jsonl") +
                            " --method direct --backend mock --out " + q(dir / "t2.jsonl"));
  // image_ref resolves relative to the dataset: images/ is not there, so the
  // run reports a per-sample failure but still exits through the backend path.
  CHECK((rerun.exit_code == 0 || rerun.exit_code == 4));
}

TEST_CASE("direction distractors through the forge CLI") {
  fs::path dir = work_dir() / "dirdis";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "cand.jsonl");
    out << R"({"question":"Which way is the exit?","answer":"front"})" << "\n";
  }
  RunResult r = run_cli("forge distract --candidates " + q(dir / "cand.jsonl") +
                        " --direction --out " + q(dir / "out.jsonl"));
  REQUIRE(r.exit_code == 0);
  std::ifstream in(dir / "out.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  nlohmann::json j = nlohmann::json::parse(line);
  CHECK(j["distractors"] == nlohmann::json::array({"right", "left", "back"}));
}

#include "odibench/data/synth.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <string_view>

#include "odibench/errors.hpp"
#include "odibench/geom/erp.hpp"
#include "odibench/io/image_io.hpp"
#include "odibench/util/rng.hpp"

namespace odibench::data {

namespace {

namespace fs = std::filesystem;

struct Paint {
  std::string_view name;
  std::array<std::uint8_t, 4> rgba;
};

constexpr std::array<Paint, 8> kBaseColors = {{
    {"gray", {96, 96, 96, 255}},
    {"navy", {24, 32, 96, 255}},
    {"olive", {96, 96, 24, 255}},
    {"teal", {24, 96, 96, 255}},
    {"maroon", {96, 24, 24, 255}},
    {"slate", {64, 72, 88, 255}},
    {"sand", {176, 160, 112, 255}},
    {"charcoal", {40, 40, 40, 255}},
}};

constexpr std::array<Paint, 6> kMarkerColors = {{
    {"red", {220, 40, 40, 255}},
    {"green", {40, 200, 60, 255}},
    {"blue", {40, 80, 220, 255}},
    {"yellow", {230, 220, 50, 255}},
    {"orange", {240, 140, 30, 255}},
    {"purple", {150, 60, 200, 255}},
}};

constexpr std::array<std::string_view, 8> kCompassWords = {
    "front", "front-right", "right", "back-right", "back", "back-left", "left", "front-left"};

// Per-image deterministic description.
struct ImagePlan {
  int index;
  Paint base;
  Paint marker;
  int marker_yaw;   // degrees, 45-degree step
  int dot_count;    // 1..5
  std::string code; // the "printed" OCR token
};

std::string synth_code(util::SplitMix& rng) {
  static constexpr std::string_view alphabet = "ABCDEFGHJKMNPQRSTUVWXYZ23456789";
  std::string code;
  for (int i = 0; i < 4; ++i) code += alphabet[rng.below(alphabet.size())];
  return code;
}

ImagePlan plan_image(const SynthSpec& spec, int k) {
  util::SplitMix rng(util::splitmix64(spec.seed * 0x9e37u + 0xB00Bu + static_cast<unsigned>(k)));
  ImagePlan p;
  p.index = k;
  p.base = kBaseColors[static_cast<std::size_t>(k) % kBaseColors.size()];
  p.marker = kMarkerColors[rng.below(kMarkerColors.size())];
  p.marker_yaw = static_cast<int>(rng.below(8)) * 45;
  p.dot_count = 1 + static_cast<int>(rng.below(5));
  p.code = synth_code(rng);
  return p;
}

std::string image_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%03d.png", k);
  return buf;
}

std::string_view compass_word(int yaw) {
  int norm = ((yaw % 360) + 360) % 360;
  return kCompassWords[static_cast<std::size_t>(norm / 45)];
}

geom::Image paint_image(const ImagePlan& p, int width) {
  int height = width / 2;
  geom::Image img = geom::Image::solid(width, height, 3, p.base.rgba);

  // Marker panel: a square patch centered on the marker direction.
  geom::SphereDir dir(p.marker_yaw, 0);
  auto [cu, cv] = geom::dir_to_erp(dir, width, height);
  int half = std::max(2, width / 24);
  for (int dy = -half; dy <= half; ++dy) {
    int y = static_cast<int>(cv) + dy;
    if (y < 0 || y >= height) continue;
    for (int dx = -half; dx <= half; ++dx) {
      int x = ((static_cast<int>(cu) + dx) % width + width) % width;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = p.marker.rgba[static_cast<std::size_t>(c)];
    }
  }

  // Counting dots: dot_count white dots spread along the upper horizon.
  int dot_r = std::max(1, width / 64);
  for (int i = 0; i < p.dot_count; ++i) {
    double yaw = -150.0 + i * (300.0 / 5.0);
    auto [du, dv] = geom::dir_to_erp(geom::SphereDir(yaw, 30), width, height);
    for (int dy = -dot_r; dy <= dot_r; ++dy) {
      int y = static_cast<int>(dv) + dy;
      if (y < 0 || y >= height) continue;
      for (int dx = -dot_r; dx <= dot_r; ++dx) {
        int x = ((static_cast<int>(du) + dx) % width + width) % width;
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = 255;
      }
    }
  }
  return img;
}

std::vector<std::string> other_colors(std::string_view truth, util::SplitMix& rng) {
  std::vector<std::string> pool;
  for (const Paint& c : kMarkerColors) {
    if (c.name != truth) pool.emplace_back(c.name);
  }
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[rng.below(i)]);
  }
  pool.resize(3);
  return pool;
}

std::vector<std::string> direction_words_away(std::string_view truth) {
  int yaw = 0;
  for (std::size_t i = 0; i < kCompassWords.size(); ++i) {
    if (kCompassWords[i] == truth) yaw = static_cast<int>(i) * 45;
  }
  return {std::string(compass_word(yaw + 90)), std::string(compass_word(yaw - 90)),
          std::string(compass_word(yaw + 180))};
}

QASample finish_close(QASample s, std::vector<std::string> distractors, std::uint64_t seed) {
  std::vector<std::string> choices;
  choices.push_back(s.answer);
  for (auto& d : distractors) choices.push_back(std::move(d));
  s.choices = std::move(choices);
  s.correct_index = 0;
  return shuffle_options(s, seed);
}

}  // namespace

Dataset make_synth_dataset(const SynthSpec& spec) {
  if (spec.image_count < 1 || spec.image_width < 32 || spec.image_width % 2 != 0) {
    throw ValidationError("bad synth spec");
  }
  if (spec.tasks.empty()) throw ValidationError("synth spec needs at least one task");

  std::vector<QASample> samples;
  samples.reserve(spec.num_samples);

  for (std::size_t i = 0; i < spec.num_samples; ++i) {
    util::SplitMix rng(util::splitmix64(spec.seed ^ (0x51AB5EEDULL + i)));
    int img_index = static_cast<int>(i % static_cast<std::size_t>(spec.image_count));
    ImagePlan plan = plan_image(spec, img_index);

    QASample s;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "synth-%06zu", i);
    s.id = idbuf;
    s.image_ref = spec.image_dir_name + "/" + image_name(img_index);
    s.task = spec.tasks[i % spec.tasks.size()];
    bool open = rng.unit() < spec.open_fraction;
    s.format = open ? AnswerFormat::open : AnswerFormat::close;

    std::string marker(plan.marker.name);
    std::string truth_word(compass_word(plan.marker_yaw));
    std::vector<std::string> distractors;

    switch (s.task) {
      case TaskKind::ObjectAttribute: {
        s.question = "What color is the square marker panel in this panorama?";
        s.answer = marker;
        distractors = other_colors(plan.marker.name, rng);
        break;
      }
      case TaskKind::HumanAttribute: {
        s.question = "What color is the vest of the person standing by the marker panel?";
        s.answer = marker;
        distractors = other_colors(plan.marker.name, rng);
        break;
      }
      case TaskKind::Existence: {
        bool present = rng.below(2) == 0;
        std::string asked = present
                                ? marker
                                : std::string(
                                      kMarkerColors[(plan.marker.name == kMarkerColors[0].name)
                                                        ? 1
                                                        : 0]
                                          .name);
        s.question = "Is there a " + asked + " marker panel anywhere around you?";
        s.answer = present ? "Yes" : "No";
        if (!open) {
          s.choices = std::vector<std::string>{"Yes", "No"};
          s.correct_index = present ? 0 : 1;
        }
        break;
      }
      case TaskKind::Counting: {
        s.question = "How many white dots are painted around the upper horizon?";
        s.answer = std::to_string(plan.dot_count);
        distractors = {std::to_string(plan.dot_count + 1), std::to_string(plan.dot_count + 2),
                       std::to_string(plan.dot_count + 3)};
        break;
      }
      case TaskKind::OCR: {
        s.question = "What code is printed on the marker panel?";
        s.answer = plan.code;
        distractors = {plan.code.substr(1) + plan.code.substr(0, 1),
                       plan.code.substr(2) + plan.code.substr(0, 2),
                       std::string(plan.code.rbegin(), plan.code.rend())};
        if (distractors[2] == plan.code) distractors[2] = plan.code + "2";
        break;
      }
      case TaskKind::EgocentricViewOrientation: {
        s.question = "From your viewpoint, in which direction is the " + marker +
                     " marker panel? Answer with an orientation word.";
        s.answer = truth_word;
        distractors = direction_words_away(truth_word);
        break;
      }
      case TaskKind::AllocentricViewOrientation: {
        int offset = static_cast<int>(rng.below(8)) * 45;
        s.question = "A statue stands facing " + std::string(compass_word(offset)) +
                     " from you. From the statue's own perspective, in which direction is the " +
                     marker + " marker panel?";
        s.answer = std::string(compass_word(plan.marker_yaw - offset));
        distractors = direction_words_away(s.answer);
        break;
      }
      case TaskKind::SceneSimulation: {
        int turn = (1 + static_cast<int>(rng.below(3))) * 90;
        s.question = "Imagine you turn to face the " + marker + " marker panel and then rotate " +
                     std::to_string(turn) +
                     " degrees clockwise. Which original direction are you now facing?";
        s.answer = std::string(compass_word(plan.marker_yaw + turn));
        distractors = direction_words_away(s.answer);
        break;
      }
      case TaskKind::RelativeDirection: {
        s.question = "Relative to the white dots on the horizon, which direction is the " +
                     marker + " marker panel from you?";
        s.answer = truth_word;
        distractors = direction_words_away(truth_word);
        break;
      }
      case TaskKind::OdiReasoning: {
        // Mixed arity inside one task: some yes/no, some 4-way.
        if (rng.below(2) == 0) {
          bool wraps = plan.marker_yaw >= 135 && plan.marker_yaw <= 225;
          s.question =
              "The marker panel appears split across the left and right edges of this "
              "equirectangular image. Does that mean it is roughly behind you?";
          s.answer = wraps ? "Yes" : "No";
          if (!open) {
            s.choices = std::vector<std::string>{"Yes", "No"};
            s.correct_index = wraps ? 0 : 1;
          }
        } else {
          s.question = "If you walked straight toward the marker panel and kept going, which "
                       "direction word describes where you started from, as seen from the panel?";
          s.answer = std::string(compass_word(plan.marker_yaw + 180));
          distractors = direction_words_away(s.answer);
        }
        break;
      }
    }

    // Each sample gets a distinct vantage tag so no two prompts are
    // byte-identical, mirroring real benchmarks where every question
    // differs. Digest-keyed policies need this to draw independently.
    s.question = "From viewing spot " + std::to_string(i) + ": " + s.question;

    if (!open && !s.choices) {
      s = finish_close(std::move(s), std::move(distractors), spec.seed ^ (0xC0FFEEULL + i));
    }
    if (open) {
      s.choices.reset();
      s.correct_index.reset();
    }
    samples.push_back(std::move(s));
  }

  return make_dataset(std::move(samples));
}

void write_synth_images(const SynthSpec& spec, const std::string& root) {
  fs::path dir = fs::path(root) / spec.image_dir_name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  for (int k = 0; k < spec.image_count; ++k) {
    ImagePlan plan = plan_image(spec, k);
    geom::Image img = paint_image(plan, spec.image_width);
    io::save_png((dir / image_name(k)).string(), img);
  }
}

}  // namespace odibench::data

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "odibench/geom/sphere.hpp"

namespace odibench::scoring {

// The ten-word orientation vocabulary: eight compass words in 45-degree yaw
// steps (front = 0, right = 90) plus the two verticals.
enum class OrientationWord {
  front,
  front_right,
  right,
  back_right,
  back,
  back_left,
  left,
  front_left,
  up,
  down,
};

inline constexpr std::array<OrientationWord, 10> kAllOrientationWords = {
    OrientationWord::front, OrientationWord::front_right, OrientationWord::right,
    OrientationWord::back_right, OrientationWord::back, OrientationWord::back_left,
    OrientationWord::left, OrientationWord::front_left, OrientationWord::up,
    OrientationWord::down,
};

std::string_view to_string(OrientationWord w);

// Case-insensitive; accepts '-', '_' or space between compound parts, and
// finds the word embedded in longer text ("slightly to the front-left").
std::optional<OrientationWord> parse_orientation(std::string_view text);

bool is_compass(OrientationWord w);
int yaw_deg(OrientationWord w);  // compass words only, 0..315
OrientationWord word_at_yaw(int yaw_deg);

// 1 for the same word, 0.5 for compass words one 45-degree step apart,
// 0 otherwise. The verticals match only themselves. Symmetric.
double direction_score(OrientationWord pred, OrientationWord truth);

struct DirectionVerdict {
  double score = 0;
  bool unrecognized = false;  // a word failed to parse; score forced to 0
};

DirectionVerdict direction_score_text(std::string_view pred, std::string_view truth);

// Orientation word for a view direction: verticals beyond |phi| = 45, else
// the nearest 45-degree compass step.
OrientationWord orientation_from_dir(const geom::SphereDir& dir);

}  // namespace odibench::scoring

#include "odibench/scoring/orientation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace odibench::scoring {

std::string_view to_string(OrientationWord w) {
  switch (w) {
    case OrientationWord::front: return "front";
    case OrientationWord::front_right: return "front-right";
    case OrientationWord::right: return "right";
    case OrientationWord::back_right: return "back-right";
    case OrientationWord::back: return "back";
    case OrientationWord::back_left: return "back-left";
    case OrientationWord::left: return "left";
    case OrientationWord::front_left: return "front-left";
    case OrientationWord::up: return "up";
    case OrientationWord::down: return "down";
  }
  return "front";
}

namespace {

// Lowercase; underscores become hyphens; everything else survives so word
// boundaries stay detectable.
std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out += c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool word_boundary(char c) {
  return !(std::isalnum(static_cast<unsigned char>(c)) || c == '-');
}

bool contains_word(const std::string& haystack, const std::string& needle) {
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || word_boundary(haystack[pos - 1]);
    std::size_t end = pos + needle.size();
    bool right_ok = end >= haystack.size() || word_boundary(haystack[end]);
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace

std::optional<OrientationWord> parse_orientation(std::string_view text) {
  std::string folded = fold(text);
  // Compound words first so "front-left" is not read as "front" or "left".
  static constexpr std::array<OrientationWord, 10> by_length = {
      OrientationWord::front_right, OrientationWord::front_left, OrientationWord::back_right,
      OrientationWord::back_left,   OrientationWord::front,      OrientationWord::right,
      OrientationWord::back,        OrientationWord::left,       OrientationWord::down,
      OrientationWord::up,
  };
  for (OrientationWord w : by_length) {
    std::string canonical(to_string(w));
    if (contains_word(folded, canonical)) return w;
    // "front left" with a space separator.
    std::size_t dash = canonical.find('-');
    if (dash != std::string::npos) {
      std::string spaced = canonical;
      spaced[dash] = ' ';
      if (contains_word(folded, spaced)) return w;
    }
  }
  return std::nullopt;
}

bool is_compass(OrientationWord w) {
  return w != OrientationWord::up && w != OrientationWord::down;
}

int yaw_deg(OrientationWord w) { return static_cast<int>(w) * 45; }

OrientationWord word_at_yaw(int yaw) {
  int norm = ((yaw % 360) + 360) % 360;
  return static_cast<OrientationWord>((norm / 45) % 8);
}

double direction_score(OrientationWord pred, OrientationWord truth) {
  if (pred == truth) return 1.0;
  if (!is_compass(pred) || !is_compass(truth)) return 0.0;
  int diff = std::abs(yaw_deg(pred) - yaw_deg(truth)) % 360;
  int minimal = std::min(diff, 360 - diff);
  return minimal == 45 ? 0.5 : 0.0;
}

DirectionVerdict direction_score_text(std::string_view pred, std::string_view truth) {
  auto p = parse_orientation(pred);
  auto t = parse_orientation(truth);
  if (!p || !t) return {0.0, true};
  return {direction_score(*p, *t), false};
}

OrientationWord orientation_from_dir(const geom::SphereDir& dir) {
  if (dir.phi() > 45.0) return OrientationWord::up;
  if (dir.phi() < -45.0) return OrientationWord::down;
  int step = static_cast<int>(std::lround(dir.theta() / 45.0));
  return word_at_yaw(step * 45);
}

}  // namespace odibench::scoring

#include "odibench/backend/random_policy.hpp"

#include <cstdlib>

#include "odibench/util/rng.hpp"

namespace odibench::backend {

int RandomChoiceBackend::detect_choice_count(const std::string& prompt) {
  // Count option markers "X. " at the start of a line, consecutively from A.
  int n = 0;
  for (char letter = 'A'; letter <= 'D'; ++letter) {
    std::string marker_line = std::string(1, letter) + ". ";
    bool found = false;
    std::size_t pos = 0;
    while ((pos = prompt.find(marker_line, pos)) != std::string::npos) {
      if (pos == 0 || prompt[pos - 1] == '\n') {
        found = true;
        break;
      }
      ++pos;
    }
    if (!found) break;
    ++n;
  }
  return n >= 2 ? n : 4;
}

ModelResponse RandomChoiceBackend::complete(const ModelRequest& req) {
  req.validate();
  const std::string prompt = req.last_user_text();
  const int n = detect_choice_count(prompt);

  // Key the draw on (seed, request) so concurrent runs stay reproducible.
  const CacheKey key = request_digest(req);
  std::uint64_t folded = 0;
  for (std::size_t i = 0; i + 16 <= key.hex.size(); i += 16) {
    folded ^= std::strtoull(key.hex.substr(i, 16).c_str(), nullptr, 16);
  }
  std::uint64_t draw = util::splitmix64(seed_ ^ folded);

  char letter = static_cast<char>('A' + static_cast<int>(draw % static_cast<std::uint64_t>(n)));
  return ModelResponse{std::string(1, letter), std::nullopt, 0};
}

}  // namespace odibench::backend

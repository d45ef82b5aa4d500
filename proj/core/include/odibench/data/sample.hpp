#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odibench/data/task.hpp"

namespace odibench::data {

enum class AnswerFormat { close, open };

std::string_view to_string(AnswerFormat f);
std::optional<AnswerFormat> format_from_string(std::string_view s);

// One benchmark question.
//
// Close-format samples carry either four choices or two (yes/no) and a
// correct_index that must point at the answer text; open-format samples
// carry no choices at all.
struct QASample {
  std::string id;
  std::string image_ref;
  TaskKind task = TaskKind::ObjectAttribute;
  AnswerFormat format = AnswerFormat::close;
  std::string question;
  std::string answer;
  std::optional<std::vector<std::string>> choices;
  std::optional<int> correct_index;

  bool is_yes_no() const { return choices && choices->size() == 2; }
  int n_choices() const { return choices ? static_cast<int>(choices->size()) : 0; }

  // Throws ValidationError naming the sample id on any broken invariant.
  void validate() const;

  std::string to_json_line() const;
  static QASample from_json_line(const std::string& line);

  bool operator==(const QASample&) const = default;
};

struct DatasetManifest {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_task;
  std::map<std::string, std::size_t> by_format;

  bool operator==(const DatasetManifest&) const = default;
};

struct Dataset {
  std::vector<QASample> samples;
  DatasetManifest manifest;

  DatasetManifest recount() const;
  const QASample* find(const std::string& id) const;
};

// Line-delimited JSON, one sample per line, with an optional leading
// "#manifest {...}" header. Errors report the 1-based line number.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);

// Builds a validated dataset (manifest recomputed, ids checked unique).
Dataset make_dataset(std::vector<QASample> samples);

// Seeded deterministic permutation of a 4-choice sample's options.
// Rejects open-format and yes/no samples.
QASample shuffle_options(const QASample& sample, std::uint64_t seed);

// Counts of correct_index over close 4-choice samples, indexed A..D.
std::array<std::size_t, 4> option_distribution(const Dataset& ds);

}  // namespace odibench::data

#pragma once

#include <map>

#include "odibench/scoring/score.hpp"

namespace odibench::scoring {

struct TaskStat {
  std::size_t count = 0;
  double mean = 0;  // in [0, 1]; tables render x100
};

struct BenchReport {
  std::map<data::TaskKind, TaskStat> per_task;
  double general_macro = 0;      // macro mean over general tasks with records
  double spatial_macro = 0;
  double overall_weighted = 0;   // headline: sample-weighted mean
  double overall_macro = 0;      // macro mean over tasks with records
  std::size_t total = 0;
};

// Per-task means plus General/Spatial macro means and both Overall variants.
// Throws on an empty record set or a record whose sample_id is not in the
// dataset. Permutation-invariant over records.
BenchReport aggregate(const std::vector<ScoreRecord>& records, const data::Dataset& dataset);

// Tab-separated row(s) in the benchmark column order:
// Overall, OA, HA, Exist., Count., OCR, EVO, AVO, SS, RD, OR.
std::string render_tsv(const BenchReport& report, const std::string& row_label);

// Human-readable fixed-width table of the same columns.
std::string render_table(const BenchReport& report, const std::string& row_label);

}  // namespace odibench::scoring

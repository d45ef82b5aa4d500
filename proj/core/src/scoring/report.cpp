#include "odibench/scoring/report.hpp"

#include <cstdio>
#include <sstream>

#include "odibench/errors.hpp"

namespace odibench::scoring {

BenchReport aggregate(const std::vector<ScoreRecord>& records, const data::Dataset& dataset) {
  if (records.empty()) throw ValidationError("no score records to aggregate");

  std::map<std::string, data::TaskKind> task_of;
  for (const data::QASample& s : dataset.samples) task_of[s.id] = s.task;

  std::map<data::TaskKind, double> sums;
  std::map<data::TaskKind, std::size_t> counts;
  double total_sum = 0;
  for (const ScoreRecord& r : records) {
    auto it = task_of.find(r.sample_id);
    if (it == task_of.end()) {
      throw ValidationError("record references unknown sample id '" + r.sample_id + "'");
    }
    sums[it->second] += r.score;
    counts[it->second] += 1;
    total_sum += r.score;
  }

  BenchReport rep;
  rep.total = records.size();
  rep.overall_weighted = total_sum / static_cast<double>(records.size());

  double macro_sum = 0, general_sum = 0, spatial_sum = 0;
  std::size_t macro_n = 0, general_n = 0, spatial_n = 0;
  for (const auto& [task, count] : counts) {
    TaskStat stat{count, sums[task] / static_cast<double>(count)};
    rep.per_task[task] = stat;
    macro_sum += stat.mean;
    ++macro_n;
    if (family(task) == data::TaskFamily::General) {
      general_sum += stat.mean;
      ++general_n;
    } else {
      spatial_sum += stat.mean;
      ++spatial_n;
    }
  }
  rep.overall_macro = macro_sum / static_cast<double>(macro_n);
  rep.general_macro = general_n ? general_sum / static_cast<double>(general_n) : 0.0;
  rep.spatial_macro = spatial_n ? spatial_sum / static_cast<double>(spatial_n) : 0.0;
  return rep;
}

namespace {

std::string fmt_score(double mean_unit) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", mean_unit * 100.0);
  return buf;
}

std::string cell(const BenchReport& rep, data::TaskKind t) {
  auto it = rep.per_task.find(t);
  return it == rep.per_task.end() ? "-" : fmt_score(it->second.mean);
}

}  // namespace

std::string render_tsv(const BenchReport& rep, const std::string& row_label) {
  std::ostringstream out;
  out << "Method\tOverall";
  for (data::TaskKind t : data::kAllTasks) out << "\t" << data::task_label(t);
  out << "\tGeneral\tSpatial\tOverall(macro)\tN\n";

  out << row_label << "\t" << fmt_score(rep.overall_weighted);
  for (data::TaskKind t : data::kAllTasks) out << "\t" << cell(rep, t);
  out << "\t" << fmt_score(rep.general_macro) << "\t" << fmt_score(rep.spatial_macro) << "\t"
      << fmt_score(rep.overall_macro) << "\t" << rep.total << "\n";
  return out.str();
}

std::string render_table(const BenchReport& rep, const std::string& row_label) {
  std::ostringstream out;
  auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };

  out << pad("Method", 18) << pad("Overall", 9);
  for (data::TaskKind t : data::kAllTasks) out << pad(std::string(data::task_label(t)), 8);
  out << pad("General", 9) << pad("Spatial", 9) << "N\n";

  out << pad(row_label, 18) << pad(fmt_score(rep.overall_weighted), 9);
  for (data::TaskKind t : data::kAllTasks) out << pad(cell(rep, t), 8);
  out << pad(fmt_score(rep.general_macro), 9) << pad(fmt_score(rep.spatial_macro), 9) << rep.total
      << "\n";
  return out.str();
}

}  // namespace odibench::scoring

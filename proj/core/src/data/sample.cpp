#include "odibench/data/sample.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"
#include "odibench/util/rng.hpp"

namespace odibench::data {

using nlohmann::json;

std::string_view to_string(AnswerFormat f) { return f == AnswerFormat::close ? "close" : "open"; }

std::optional<AnswerFormat> format_from_string(std::string_view s) {
  if (s == "close") return AnswerFormat::close;
  if (s == "open") return AnswerFormat::open;
  return std::nullopt;
}

void QASample::validate() const {
  auto fail = [this](const std::string& why) {
    throw ValidationError("sample '" + id + "': " + why);
  };
  if (id.empty()) throw ValidationError("sample with empty id");
  if (question.empty()) fail("empty question");
  if (format == AnswerFormat::close) {
    if (!choices) fail("close format requires choices");
    if (choices->size() != 4 && choices->size() != 2) {
      fail("close format requires exactly 4 choices (or 2 for yes/no)");
    }
    if (!correct_index) fail("close format requires correct_index");
    if (*correct_index < 0 || *correct_index >= static_cast<int>(choices->size())) {
      fail("correct_index out of range");
    }
    if ((*choices)[static_cast<std::size_t>(*correct_index)] != answer) {
      fail("choices[correct_index] does not match the answer");
    }
  } else {
    if (choices) fail("open format must not carry choices");
    if (correct_index) fail("open format must not carry correct_index");
  }
}

std::string QASample::to_json_line() const {
  json j;
  j["id"] = id;
  j["image_ref"] = image_ref;
  j["task"] = std::string(to_string(task));
  j["format"] = std::string(to_string(format));
  j["question"] = question;
  j["answer"] = answer;
  if (choices) j["choices"] = *choices;
  if (correct_index) j["correct_index"] = *correct_index;
  return j.dump();
}

QASample QASample::from_json_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError("malformed JSON record");

  QASample s;
  try {
    s.id = j.at("id").get<std::string>();
    s.image_ref = j.value("image_ref", std::string());
    auto task = task_from_string(j.at("task").get<std::string>());
    if (!task) throw ValidationError("unknown task '" + j.at("task").get<std::string>() + "'");
    s.task = *task;
    auto fmt = format_from_string(j.at("format").get<std::string>());
    if (!fmt) throw ValidationError("unknown format '" + j.at("format").get<std::string>() + "'");
    s.format = *fmt;
    s.question = j.at("question").get<std::string>();
    s.answer = j.at("answer").get<std::string>();
    if (j.contains("choices")) s.choices = j.at("choices").get<std::vector<std::string>>();
    if (j.contains("correct_index")) s.correct_index = j.at("correct_index").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad record field: ") + e.what());
  }
  return s;
}

DatasetManifest Dataset::recount() const {
  DatasetManifest m;
  m.total = samples.size();
  for (const QASample& s : samples) {
    m.by_task[std::string(to_string(s.task))]++;
    m.by_format[std::string(to_string(s.format))]++;
  }
  return m;
}

const QASample* Dataset::find(const std::string& id) const {
  for (const QASample& s : samples) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

namespace {

constexpr std::string_view kManifestPrefix = "#manifest ";

json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["total"] = m.total;
  j["by_task"] = m.by_task;
  j["by_format"] = m.by_format;
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  m.total = j.at("total").get<std::size_t>();
  if (j.contains("by_task")) m.by_task = j.at("by_task").get<std::map<std::string, std::size_t>>();
  if (j.contains("by_format"))
    m.by_format = j.at("by_format").get<std::map<std::string, std::size_t>>();
  return m;
}

}  // namespace

Dataset make_dataset(std::vector<QASample> samples) {
  std::set<std::string> ids;
  for (const QASample& s : samples) {
    s.validate();
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sample id '" + s.id + "'");
  }
  Dataset ds;
  ds.samples = std::move(samples);
  ds.manifest = ds.recount();
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);

  Dataset ds;
  std::optional<DatasetManifest> declared;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind(kManifestPrefix, 0) == 0) {
      try {
        declared = manifest_from_json(json::parse(line.substr(kManifestPrefix.size())));
      } catch (const json::exception& e) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": bad manifest header: " +
                              e.what());
      }
      continue;
    }
    if (line[0] == '#') continue;
    try {
      QASample s = QASample::from_json_line(line);
      s.validate();
      if (!ids.insert(s.id).second) {
        throw ValidationError("duplicate sample id '" + s.id + "'");
      }
      ds.samples.push_back(std::move(s));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }

  ds.manifest = ds.recount();
  if (declared && !(*declared == ds.manifest)) {
    throw ValidationError(path + ": manifest header does not match recomputed counts");
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path);
  out << kManifestPrefix << manifest_to_json(ds.recount()).dump() << "\n";
  for (const QASample& s : ds.samples) {
    out << s.to_json_line() << "\n";
  }
  if (!out) throw IoError("short write on " + path);
}

QASample shuffle_options(const QASample& sample, std::uint64_t seed) {
  if (sample.format != AnswerFormat::close || !sample.choices || sample.choices->size() != 4) {
    throw ValidationError("shuffle_options expects a close-format sample with 4 choices");
  }
  QASample out = sample;
  std::array<int, 4> perm = {0, 1, 2, 3};
  util::SplitMix rng(util::splitmix64(seed));
  for (int i = 3; i > 0; --i) {
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<std::string> shuffled(4);
  int new_correct = 0;
  for (int pos = 0; pos < 4; ++pos) {
    int src = perm[static_cast<std::size_t>(pos)];
    shuffled[static_cast<std::size_t>(pos)] = (*sample.choices)[static_cast<std::size_t>(src)];
    if (src == *sample.correct_index) new_correct = pos;
  }
  out.choices = std::move(shuffled);
  out.correct_index = new_correct;
  return out;
}

std::array<std::size_t, 4> option_distribution(const Dataset& ds) {
  std::array<std::size_t, 4> counts = {0, 0, 0, 0};
  for (const QASample& s : ds.samples) {
    if (s.format == AnswerFormat::close && s.choices && s.choices->size() == 4 &&
        s.correct_index) {
      counts[static_cast<std::size_t>(*s.correct_index)]++;
    }
  }
  return counts;
}

}  // namespace odibench::data

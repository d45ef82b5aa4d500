#include "odibench/pipeline/eval.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "odibench/errors.hpp"
#include "odibench/io/image_io.hpp"

namespace odibench::pipeline {

namespace fs = std::filesystem;

namespace {

// Loads each distinct panorama once; shared across workers.
class ErpPool {
 public:
  explicit ErpPool(std::string base_dir) : base_(std::move(base_dir)) {}

  std::shared_ptr<const geom::ErpImage> get(const std::string& ref) {
    std::string path = resolve(ref);
    {
      std::scoped_lock lock(mu_);
      auto it = cache_.find(path);
      if (it != cache_.end()) return it->second;
    }
    auto erp = std::make_shared<const geom::ErpImage>(io::load_erp(path));
    std::scoped_lock lock(mu_);
    return cache_.emplace(path, std::move(erp)).first->second;
  }

 private:
  std::string resolve(const std::string& ref) const {
    fs::path p(ref);
    if (p.is_absolute() || base_.empty()) return ref;
    return (fs::path(base_) / p).string();
  }

  std::string base_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const geom::ErpImage>> cache_;
};

}  // namespace

EvalResult run_eval(const data::Dataset& dataset, backend::BackendPtr backend,
                    const prompts::PromptLibrary& prompts, const EvalOptions& opts) {
  if (opts.workers < 1) throw ConfigError("workers must be >= 1");

  PipelineRunner runner(backend, prompts, opts.pipeline);
  ErpPool pool(opts.dataset_dir);

  const std::size_t total = dataset.samples.size();
  std::vector<PipelineTrace> traces(total);
  std::vector<char> produced(total, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  std::atomic<std::size_t> done{0};

  auto worker = [&] {
    while (true) {
      if (opts.interrupted && opts.interrupted()) return;
      std::size_t i = next.fetch_add(1);
      if (i >= total) return;

      const data::QASample& sample = dataset.samples[i];
      PipelineTrace trace;
      try {
        auto erp = pool.get(sample.image_ref);
        trace = runner.run(opts.method, sample, *erp);
      } catch (const Error& e) {
        trace.sample_id = sample.id;
        trace.method = opts.method;
        trace.warnings.push_back(std::string("failed: ") + e.what());
        failures.fetch_add(1);
      }
      traces[i] = std::move(trace);
      produced[i] = 1;
      std::size_t d = done.fetch_add(1) + 1;
      if (opts.progress) opts.progress(d, total);
    }
  };

  int n = std::max(1, opts.workers);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  EvalResult result;
  result.hard_failures = failures.load();
  for (std::size_t i = 0; i < total; ++i) {
    if (produced[i]) {
      result.traces.push_back(std::move(traces[i]));
      ++result.completed;
    }
  }
  return result;
}

std::vector<scoring::ScoreRecord> score_traces(const data::Dataset& dataset,
                                               const std::vector<PipelineTrace>& traces,
                                               backend::Backend* judge,
                                               const prompts::PromptLibrary& prompts,
                                               const scoring::JudgeOptions& judge_opts) {
  std::map<std::string, const data::QASample*> by_id;
  for (const data::QASample& s : dataset.samples) by_id[s.id] = &s;

  std::vector<scoring::ScoreRecord> records;
  records.reserve(traces.size());
  for (const PipelineTrace& t : traces) {
    auto it = by_id.find(t.sample_id);
    if (it == by_id.end()) {
      throw ValidationError("trace references unknown sample id '" + t.sample_id + "'");
    }
    scoring::ScoreRecord rec =
        scoring::score_sample(*it->second, std::string(method_cli_token(t.method)),
                              t.final_answer, judge, prompts, judge_opts);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace odibench::pipeline

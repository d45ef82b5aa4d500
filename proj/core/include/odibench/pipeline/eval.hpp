#pragma once

#include <functional>

#include "odibench/pipeline/runner.hpp"
#include "odibench/scoring/score.hpp"

namespace odibench::pipeline {

struct EvalOptions {
  Method method = Method::direct;
  int workers = 1;
  PipelineOptions pipeline;
  std::string dataset_dir;  // base for relative image refs

  // Polled between samples; a true return drains in-flight work and stops.
  std::function<bool()> interrupted;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct EvalResult {
  std::vector<PipelineTrace> traces;  // dataset order; failed samples keep partial ledgers
  std::size_t hard_failures = 0;
  std::size_t completed = 0;
};

// Runs the chosen pipeline over every dataset sample with a bounded worker
// pool. Panoramas are loaded once per distinct path. Per-sample failures are
// recorded in the sample's trace warnings and counted, not thrown.
EvalResult run_eval(const data::Dataset& dataset, backend::BackendPtr backend,
                    const prompts::PromptLibrary& prompts, const EvalOptions& opts);

// Scores traces against their samples: close-format by extraction and
// accuracy, open-format through the judge.
std::vector<scoring::ScoreRecord> score_traces(const data::Dataset& dataset,
                                               const std::vector<PipelineTrace>& traces,
                                               backend::Backend* judge,
                                               const prompts::PromptLibrary& prompts,
                                               const scoring::JudgeOptions& judge_opts = {});

}  // namespace odibench::pipeline

#pragma once

#include <string>

#include "odibench/data/sample.hpp"

namespace odibench::data {

// Desk-scale fixture generator. Paints tiny panoramas with a colored marker
// panel at a known compass direction plus a row of counting dots, and emits
// QA samples whose answers are true of the painted content (color, count,
// existence, direction). Remaining tasks get procedural QA tied to the same
// deterministic stream.
struct SynthSpec {
  std::size_t num_samples = 100;
  std::uint64_t seed = 0;
  int image_count = 8;
  int image_width = 128;      // ERP width; height is width/2
  double open_fraction = 0.0; // fraction of samples emitted open-format
  std::vector<TaskKind> tasks{kAllTasks.begin(), kAllTasks.end()};
  std::string image_dir_name = "images";
};

Dataset make_synth_dataset(const SynthSpec& spec);

// Writes the panoramas referenced by the generated dataset under
// root/<image_dir_name>/. Call with the same spec used for the samples.
void write_synth_images(const SynthSpec& spec, const std::string& root);

}  // namespace odibench::data

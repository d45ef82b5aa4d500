#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odibench/geom/crop_cue.hpp"
#include "odibench/geom/image.hpp"
#include "odibench/geom/view.hpp"

namespace odibench::pipeline {

enum class Method { direct, zero_shot_cot, viewpoint_guided, omni_cot };

std::string_view to_string(Method m);
// Accepts both the long names and the CLI tokens (direct, zscot, vpg, omnicot).
std::optional<Method> method_from_string(std::string_view s);
std::string_view method_cli_token(Method m);

struct ViewpointCaption {
  geom::ViewName view = geom::ViewName::front;
  std::string caption;

  bool operator==(const ViewpointCaption&) const = default;
};

enum class Relevance { unjudged, yes, no };
std::string_view to_string(Relevance r);

// One grounded region: its box, derived spherical geometry, rendered crop
// and the relevance verdict. The pixel buffer stays in memory only; traces
// serialize everything else.
struct CropCue {
  geom::NormalizedBox box;
  geom::CropGeometry geometry;
  geom::Image crop;
  Relevance relevance = Relevance::unjudged;
};

struct CallRecord {
  std::string stage;
  std::string digest;
  std::int64_t latency_ms = 0;

  bool operator==(const CallRecord&) const = default;
};

// Full record of one pipeline run over one sample.
struct PipelineTrace {
  std::string sample_id;
  Method method = Method::direct;
  std::vector<ViewpointCaption> captions;
  std::vector<geom::NormalizedBox> boxes_raw;
  std::vector<CropCue> cues;
  std::string initial_answer;
  std::string final_answer;
  std::vector<CallRecord> calls;
  std::vector<std::string> warnings;

  // Structural invariants of the method that produced this trace.
  void check_invariants() const;

  std::string to_json_line() const;
  static PipelineTrace from_json_line(const std::string& line);
};

void write_traces(const std::string& path, const std::vector<PipelineTrace>& traces);
std::vector<PipelineTrace> read_traces(const std::string& path);

}  // namespace odibench::pipeline

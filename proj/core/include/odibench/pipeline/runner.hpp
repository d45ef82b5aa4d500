#pragma once

#include "odibench/backend/backend.hpp"
#include "odibench/data/sample.hpp"
#include "odibench/geom/erp.hpp"
#include "odibench/pipeline/trace.hpp"
#include "odibench/prompts/prompt_library.hpp"

namespace odibench::pipeline {

struct PipelineOptions {
  std::string model_id = "eval";
  double temperature = 0.0;
  int max_tokens = 1024;
  double margin = geom::kDefaultCropMargin;
  int crop_size = 512;
  int view_size = 512;
  double view_fov = 90.0;
  int max_boxes = 4;           // K: cap on grounded regions
  int erp_long_edge_limit = 4096;  // panoramas above this are downscaled for upload
  bool blind = false;          // direct answering without the image
  int render_threads = 1;
};

// Reasoning pipelines over one backend: direct answering, zero-shot
// step-by-step answering, viewpoint-guided answering, and the full
// three-stage chain (viewpoint guiding, crop grounding and refinement,
// response refinement). Stateless apart from configuration; safe to share
// across worker threads.
class PipelineRunner {
 public:
  PipelineRunner(backend::BackendPtr backend, prompts::PromptLibrary prompts,
                 PipelineOptions opts = {});

  PipelineTrace run(Method method, const data::QASample& sample,
                    const geom::ErpImage& erp) const;

  PipelineTrace direct_answer(const data::QASample& sample, const geom::ErpImage& erp) const;
  PipelineTrace zero_shot_cot(const data::QASample& sample, const geom::ErpImage& erp) const;
  PipelineTrace viewpoint_guided(const data::QASample& sample, const geom::ErpImage& erp) const;
  PipelineTrace omni_cot(const data::QASample& sample, const geom::ErpImage& erp) const;

  // Individual stages, exposed for tests. Each appends to the trace ledger.
  std::vector<geom::NormalizedBox> ground_crops(const data::QASample& sample,
                                                const geom::ErpImage& erp,
                                                PipelineTrace& trace) const;
  std::vector<CropCue> build_cues(const geom::ErpImage& erp,
                                  const std::vector<geom::NormalizedBox>& boxes) const;
  void refine_crops(const std::string& question, std::vector<CropCue>& cues,
                    PipelineTrace& trace) const;
  std::string refine_response(const data::QASample& sample, const geom::ErpImage& erp,
                              PipelineTrace& trace) const;

  const PipelineOptions& options() const { return opts_; }

 private:
  backend::ModelRequest new_request() const;
  backend::ModelResponse call(const std::string& stage, const backend::ModelRequest& req,
                              PipelineTrace& trace) const;
  std::vector<std::uint8_t> erp_upload_png(const geom::ErpImage& erp) const;
  std::string captions_block(const PipelineTrace& trace) const;

  backend::BackendPtr backend_;
  prompts::PromptLibrary prompts_;
  PipelineOptions opts_;
};

// "A. ...\nB. ..." block for a close-format sample.
std::string format_choices(const data::QASample& sample);

// <think>/<answer> tag pair; nullopt when the pair is absent.
std::optional<std::pair<std::string, std::string>> parse_think_answer(const std::string& text);

// Lenient bracket-list parser for grounding output. Finds the first
// box-shaped JSON array in the text, clamps coordinates into [0, 1], drops
// degenerate boxes and truncates to max_boxes. Unparseable text yields an
// empty list plus a warning, never an error.
std::vector<geom::NormalizedBox> parse_box_list(const std::string& text, int max_boxes,
                                                std::vector<std::string>* warnings);

// First yes/no token, case-insensitive.
std::optional<bool> parse_yes_no_token(const std::string& text);

}  // namespace odibench::pipeline

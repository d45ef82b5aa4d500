#pragma once

#include <array>
#include <set>

#include "odibench/backend/backend.hpp"
#include "odibench/data/sample.hpp"
#include "odibench/forge/detection.hpp"
#include "odibench/geom/image.hpp"
#include "odibench/prompts/prompt_library.hpp"
#include "odibench/scoring/orientation.hpp"

namespace odibench::forge {

// True when the mask has a set pixel within `edge_tolerance` pixels of the
// face border; such instances are treated as spanning multiple views.
bool touches_border(const MaskBitmap& mask, int edge_tolerance);

// Drops detections whose mask touches the face border.
std::vector<InstanceDetection> filter_cross_face(const std::vector<InstanceDetection>& dets,
                                                 int edge_tolerance = 2);

// True iff the label occurs in the caption as an in-order token subsequence,
// case-folded and singular/plural normalized.
bool consistency_check(const std::string& label, const std::string& caption);

// A QA pair on its way into the benchmark. Anything with review flags goes
// to the review export, never into a dataset.
struct CandidateQA {
  std::string instance_ref;
  std::string caption;
  std::string question;
  std::string answer;
  std::vector<std::string> distractors;
  std::set<std::string> review_flags;

  std::string to_json_line() const;
  static CandidateQA from_json_line(const std::string& line);
};

struct DistractorOptions {
  std::string model_id = "forge";
  int max_tokens = 256;
};

// One backend call asking for three wrong options for the QA; output parsed
// as three lines (or a JSON list). Parse trouble and quality problems set
// review flags instead of failing: "arity", "duplicate", "answer_overlap",
// "empty".
CandidateQA gen_distractors(backend::Backend& backend, CandidateQA qa, const geom::Image& image,
                            const prompts::PromptLibrary& prompts,
                            const DistractorOptions& opts = {});

// Distractors for a compass ground truth: the words at +90, -90 and 180
// degrees. Vertical truths fall back to the other vertical plus front/back.
std::array<scoring::OrientationWord, 3> direction_distractors(scoring::OrientationWord truth);

void export_review(const std::string& path, const std::vector<CandidateQA>& flagged);
std::vector<CandidateQA> load_candidates(const std::string& path);
void save_candidates(const std::vector<CandidateQA>& candidates, const std::string& path);

// Builds a close-format dataset from clean candidates (flagged ones are
// rejected), shuffling options with per-sample seeds derived from `seed`.
data::Dataset candidates_to_dataset(const std::vector<CandidateQA>& candidates,
                                    data::TaskKind task, const std::string& image_ref,
                                    std::uint64_t seed);

}  // namespace odibench::forge

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odibench/geom/crop_cue.hpp"
#include "odibench/geom/view.hpp"

namespace odibench::forge {

// Binary instance mask over one cube face raster.
struct MaskBitmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // one byte per pixel, 0 or 1

  static MaskBitmap from_rle(int width, int height, const std::vector<std::uint32_t>& runs);
  std::vector<std::uint32_t> to_rle() const;

  bool get(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t popcount() const;

  // Tight pixel bounds of the set pixels, normalized to the face extent.
  geom::NormalizedBox tight_bbox() const;
};

// One segmented instance on one cube face.
struct InstanceDetection {
  geom::ViewName face = geom::ViewName::front;
  std::string label;
  MaskBitmap mask;
  geom::NormalizedBox bbox;  // face coordinates

  // mask nonempty and bbox equal to the mask's tight bounds.
  void validate() const;
};

// Line-delimited JSON: {"face", "label", "width", "height", "mask_rle",
// "bbox"}. The RLE alternates zero-runs and one-runs starting with zeros,
// row-major.
std::vector<InstanceDetection> load_detections(const std::string& path);
void save_detections(const std::vector<InstanceDetection>& dets, const std::string& path);

}  // namespace odibench::forge

#pragma once

#include "odibench/geom/sphere.hpp"

namespace odibench::geom {

inline constexpr double kMinCropFov = 30.0;
inline constexpr double kMaxCropFov = 120.0;
inline constexpr double kDefaultCropMargin = 10.0;

// Axis-aligned box in normalized image coordinates, top-left origin.
struct NormalizedBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  NormalizedBox() = default;
  NormalizedBox(double x1_, double y1_, double x2_, double y2_) : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
    if (!(0.0 <= x1 && x1 < x2 && x2 <= 1.0) || !(0.0 <= y1 && y1 < y2 && y2 <= 1.0)) {
      throw ValidationError("degenerate normalized box");
    }
  }

  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  bool operator==(const NormalizedBox&) const = default;
};

// Where to aim a perspective crop and how wide to open it.
struct CropGeometry {
  SphereDir center;
  double fov = 90.0;     // degrees, kept inside [30, 120]
  double margin = kDefaultCropMargin;

  bool operator==(const CropGeometry&) const = default;
};

// Spherical parameters of the narrow-FoV crop for a grounded box:
//   theta = -180 + cx*360, phi = 90 - cy*180,
//   fov   = clip(max((x2-x1)*360, (y2-y1)*180) + margin, 30, 120).
CropGeometry crop_cue_geometry(const NormalizedBox& box, double margin = kDefaultCropMargin);

}  // namespace odibench::geom

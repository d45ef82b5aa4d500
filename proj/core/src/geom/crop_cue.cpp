#include "odibench/geom/crop_cue.hpp"

#include <algorithm>

namespace odibench::geom {

CropGeometry crop_cue_geometry(const NormalizedBox& box, double margin) {
  if (margin < 0) throw ValidationError("negative crop margin");

  double theta = -180.0 + box.center_x() * 360.0;
  double phi = 90.0 - box.center_y() * 180.0;

  double fov_w = (box.x2 - box.x1) * 360.0;
  double fov_h = (box.y2 - box.y1) * 180.0;
  double fov = std::clamp(std::max(fov_w, fov_h) + margin, kMinCropFov, kMaxCropFov);

  return CropGeometry{SphereDir(theta, phi), fov, margin};
}

}  // namespace odibench::geom

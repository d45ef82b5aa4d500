#pragma once

#include "odibench/geom/crop_cue.hpp"
#include "odibench/geom/erp.hpp"

namespace odibench::geom {

// Orthonormal camera basis for a view centered on `center`. The up vector is
// world-up except at the poles, where it becomes -front (top view) or +front
// (bottom view).
struct CameraFrame {
  Vec3 right, up, forward;
  static CameraFrame look_at(const SphereDir& center);
};

// Direction sampled for output pixel (px, py) of a w x h rectilinear view
// with horizontal FoV `fov_deg`, aimed at `center`. Pixel centers sit at
// (px + 0.5, py + 0.5); vertical FoV follows from the aspect ratio.
SphereDir gnomonic_pixel_dir(const SphereDir& center, double fov_deg, int out_w, int out_h,
                             double px, double py);

// Rectilinear (gnomonic) rendering of the panorama, bilinear-sampled.
// Throws on fov outside (0, 180) or non-positive output dimensions.
// `threads` > 1 splits rows across workers; output is identical regardless.
Image gnomonic_render(const ErpImage& erp, const SphereDir& center, double fov_deg, int out_w,
                      int out_h, int threads = 1);

// Square perspective crop for a grounded region.
Image render_crop(const ErpImage& erp, const CropGeometry& geom, int out_size = 512,
                  int threads = 1);

}  // namespace odibench::geom

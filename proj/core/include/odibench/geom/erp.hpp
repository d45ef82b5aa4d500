#pragma once

#include <utility>

#include "odibench/geom/image.hpp"
#include "odibench/geom/sphere.hpp"

namespace odibench::geom {

// Equirectangular panorama. Longitude is linear in x with theta = -180 at
// the left edge and the front direction at the center column; latitude is
// linear in y with phi = +90 at the top row.
//
// The wrapped image must be 2:1 within 1% relative tolerance.
class ErpImage {
 public:
  explicit ErpImage(Image img);

  const Image& image() const { return img_; }
  int width() const { return img_.width; }
  int height() const { return img_.height; }

  // Bilinear sample at continuous pixel coordinates, u in [0, W], v in [0, H].
  // Texel centers sit at half-integer coordinates; u wraps around the theta
  // seam, v clamps at the poles.
  Rgba sample(double u, double v) const;

  Rgba sample_dir(const SphereDir& dir) const;

 private:
  Image img_;
};

// Pixel -> direction map: theta = -180 + (u/W)*360, phi = 90 - (v/H)*180.
// Throws if (u, v) falls outside [0, W] x [0, H].
SphereDir erp_to_dir(double u, double v, int width, int height);

// Exact algebraic inverse of erp_to_dir.
std::pair<double, double> dir_to_erp(const SphereDir& dir, int width, int height);

}  // namespace odibench::geom

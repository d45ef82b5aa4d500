#include "odibench/geom/erp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace odibench::geom {

ErpImage::ErpImage(Image img) : img_(std::move(img)) {
  if (img_.width < 2 || img_.height < 1) {
    throw ValidationError("panorama too small: " + std::to_string(img_.width) + "x" +
                          std::to_string(img_.height));
  }
  const double expected = 2.0 * img_.height;
  const double rel = std::abs(img_.width - expected) / expected;
  if (rel > 0.01) {
    throw ValidationError("panorama is not 2:1 (got " + std::to_string(img_.width) + "x" +
                          std::to_string(img_.height) + ")");
  }
}

Rgba ErpImage::sample(double u, double v) const {
  const int W = img_.width, H = img_.height;

  // Texel-space position; texel i has its center at i + 0.5.
  double x = u - 0.5;
  double y = v - 0.5;

  double xf = std::floor(x);
  double yf = std::floor(y);
  double wx = x - xf;
  double wy = y - yf;

  auto wrap = [W](long i) {
    long m = i % W;
    return static_cast<int>(m < 0 ? m + W : m);
  };
  int x0 = wrap(static_cast<long>(xf));
  int x1 = wrap(static_cast<long>(xf) + 1);
  int y0 = std::clamp(static_cast<int>(yf), 0, H - 1);
  int y1 = std::clamp(static_cast<int>(yf) + 1, 0, H - 1);

  Rgba out;
  float* acc[4] = {&out.r, &out.g, &out.b, &out.a};
  const int C = img_.channels;
  for (int c = 0; c < C; ++c) {
    double top = img_.at(x0, y0, c) * (1 - wx) + img_.at(x1, y0, c) * wx;
    double bot = img_.at(x0, y1, c) * (1 - wx) + img_.at(x1, y1, c) * wx;
    *acc[c] = static_cast<float>(top * (1 - wy) + bot * wy);
  }
  if (C == 1) {
    out.g = out.b = out.r;
    out.a = 255;
  } else if (C == 3) {
    out.a = 255;
  }
  return out;
}

Rgba ErpImage::sample_dir(const SphereDir& dir) const {
  auto [u, v] = dir_to_erp(dir, img_.width, img_.height);
  return sample(u, v);
}

SphereDir erp_to_dir(double u, double v, int width, int height) {
  if (u < 0 || u > width || v < 0 || v > height) {
    throw ValidationError("pixel coordinates outside the panorama: (" + std::to_string(u) + ", " +
                          std::to_string(v) + ")");
  }
  double theta = -180.0 + (u / width) * 360.0;
  double phi = 90.0 - (v / height) * 180.0;
  return {theta, phi};
}

std::pair<double, double> dir_to_erp(const SphereDir& dir, int width, int height) {
  double u = (dir.theta() + 180.0) / 360.0 * width;
  double v = (90.0 - dir.phi()) / 180.0 * height;
  return {u, v};
}

}  // namespace odibench::geom

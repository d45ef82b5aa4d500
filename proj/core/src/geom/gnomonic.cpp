#include "odibench/geom/gnomonic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

namespace odibench::geom {

CameraFrame CameraFrame::look_at(const SphereDir& center) {
  Vec3 forward = center.unit();
  Vec3 up;
  if (center.phi() >= 90.0) {
    up = {0, 0, -1};  // top view: image-up points backward
  } else if (center.phi() <= -90.0) {
    up = {0, 0, 1};   // bottom view: image-up points forward
  } else {
    up = {0, 1, 0};
  }
  Vec3 right = up.cross(forward).normalized();
  Vec3 true_up = forward.cross(right);
  return {right, true_up, forward};
}

SphereDir gnomonic_pixel_dir(const SphereDir& center, double fov_deg, int out_w, int out_h,
                             double px, double py) {
  CameraFrame cam = CameraFrame::look_at(center);
  double half_w = std::tan(deg2rad(fov_deg) / 2.0);
  double half_h = half_w * static_cast<double>(out_h) / out_w;

  double nx = ((px + 0.5) / out_w) * 2.0 - 1.0;
  double ny = 1.0 - ((py + 0.5) / out_h) * 2.0;
  Vec3 d = cam.forward + cam.right * (nx * half_w) + cam.up * (ny * half_h);
  return SphereDir::from_unit(d);
}

namespace {

void render_rows(const ErpImage& erp, const CameraFrame& cam, double half_w, double half_h,
                 Image& out, int y_begin, int y_end) {
  const int W = out.width, H = out.height, C = out.channels;
  const int erp_w = erp.width(), erp_h = erp.height();
  for (int y = y_begin; y < y_end; ++y) {
    double ny = 1.0 - ((y + 0.5) / H) * 2.0;
    Vec3 row = cam.forward + cam.up * (ny * half_h);
    for (int x = 0; x < W; ++x) {
      double nx = ((x + 0.5) / W) * 2.0 - 1.0;
      Vec3 d = row + cam.right * (nx * half_w);
      SphereDir dir = SphereDir::from_unit(d);
      double u = (dir.theta() + 180.0) / 360.0 * erp_w;
      double v = (90.0 - dir.phi()) / 180.0 * erp_h;
      Rgba s = erp.sample(u, v);
      const float chan[4] = {s.r, s.g, s.b, s.a};
      for (int c = 0; c < C; ++c) {
        out.at(x, y, c) =
            static_cast<std::uint8_t>(std::clamp(std::lround(chan[c]), 0L, 255L));
      }
    }
  }
}

}  // namespace

Image gnomonic_render(const ErpImage& erp, const SphereDir& center, double fov_deg, int out_w,
                      int out_h, int threads) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw ValidationError("field of view must be inside (0, 180): " + std::to_string(fov_deg));
  }
  if (out_w < 1 || out_h < 1) throw ValidationError("bad view dimensions");

  CameraFrame cam = CameraFrame::look_at(center);
  double half_w = std::tan(deg2rad(fov_deg) / 2.0);
  double half_h = half_w * static_cast<double>(out_h) / out_w;

  Image out(out_w, out_h, erp.image().channels);
  int n = std::max(1, threads);
  if (n == 1 || out_h < 2 * n) {
    render_rows(erp, cam, half_w, half_h, out, 0, out_h);
    return out;
  }

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  int chunk = (out_h + n - 1) / n;
  for (int i = 0; i < n; ++i) {
    int y0 = i * chunk;
    int y1 = std::min(out_h, y0 + chunk);
    if (y0 >= y1) break;
    pool.emplace_back(
        [&, y0, y1] { render_rows(erp, cam, half_w, half_h, out, y0, y1); });
  }
  for (auto& t : pool) t.join();
  return out;
}

Image render_crop(const ErpImage& erp, const CropGeometry& geom, int out_size, int threads) {
  return gnomonic_render(erp, geom.center, geom.fov, out_size, out_size, threads);
}

}  // namespace odibench::geom

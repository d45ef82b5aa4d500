#include "odibench/geom/image.hpp"

#include <algorithm>
#include <cmath>

namespace odibench::geom {

Image resize_bilinear(const Image& src, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw ValidationError("bad resize target");
  if (out_w == src.width && out_h == src.height) return src;

  Image dst(out_w, out_h, src.channels);
  const double sx = static_cast<double>(src.width) / out_w;
  const double sy = static_cast<double>(src.height) / out_h;

  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y1 = std::clamp(y0 + 1, 0, src.height - 1);
    y0 = std::clamp(y0, 0, src.height - 1);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x1 = std::clamp(x0 + 1, 0, src.width - 1);
      x0 = std::clamp(x0, 0, src.width - 1);
      for (int c = 0; c < src.channels; ++c) {
        double top = src.at(x0, y0, c) * (1 - wx) + src.at(x1, y0, c) * wx;
        double bot = src.at(x0, y1, c) * (1 - wx) + src.at(x1, y1, c) * wx;
        double v = top * (1 - wy) + bot * wy;
        dst.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return dst;
}

}  // namespace odibench::geom

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "odibench/errors.hpp"

namespace odibench::geom {

// Interleaved 8-bit raster, row-major, 1/3/4 channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c) {
    if (w < 1 || h < 1 || (c != 1 && c != 3 && c != 4)) {
      throw ValidationError("bad image dimensions " + std::to_string(w) + "x" +
                            std::to_string(h) + "x" + std::to_string(c));
    }
    pixels.assign(static_cast<std::size_t>(w) * h * c, 0);
  }

  static Image solid(int w, int h, int c, std::array<std::uint8_t, 4> color) {
    Image img(w, h, c);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int k = 0; k < c; ++k) img.at(x, y, k) = color[static_cast<std::size_t>(k)];
    return img;
  }

  std::uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool empty() const { return pixels.empty(); }

  bool operator==(const Image&) const = default;
};

// Floating-point sample, 0..255 scale. Alpha is 255 for opaque formats.
struct Rgba {
  float r = 0, g = 0, b = 0, a = 255;
};

// Plain separable bilinear resize (clamped edges).
Image resize_bilinear(const Image& src, int out_w, int out_h);

}  // namespace odibench::geom

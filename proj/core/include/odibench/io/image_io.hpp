#pragma once

#include <string>
#include <utility>
#include <vector>

#include "odibench/geom/erp.hpp"
#include "odibench/geom/image.hpp"

namespace odibench::io {

using PngText = std::pair<std::string, std::string>;

// Decodes a PNG or JPEG file (sniffed by magic bytes).
geom::Image load_image(const std::string& path);

// Loads and validates a panorama in one step.
geom::ErpImage load_erp(const std::string& path);

void save_png(const std::string& path, const geom::Image& img,
              const std::vector<PngText>& text = {});
void save_jpeg(const std::string& path, const geom::Image& img, int quality = 90);

// tEXt key/value chunks of a PNG file.
std::vector<PngText> read_png_text(const std::string& path);

// In-memory PNG codec, used to embed images in model requests.
std::vector<std::uint8_t> encode_png(const geom::Image& img);
geom::Image decode_png(const std::vector<std::uint8_t>& bytes);

}  // namespace odibench::io

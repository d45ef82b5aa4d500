#include "odibench/forge/detection.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "odibench/errors.hpp"

namespace odibench::forge {

using nlohmann::json;

MaskBitmap MaskBitmap::from_rle(int width, int height, const std::vector<std::uint32_t>& runs) {
  if (width < 1 || height < 1) throw ValidationError("bad mask dimensions");
  MaskBitmap m;
  m.width = width;
  m.height = height;
  m.bits.assign(static_cast<std::size_t>(width) * height, 0);

  std::size_t pos = 0;
  std::uint8_t value = 0;  // runs start with zeros
  for (std::uint32_t run : runs) {
    if (pos + run > m.bits.size()) throw ValidationError("mask RLE overruns the raster");
    if (value) std::fill_n(m.bits.begin() + static_cast<long>(pos), run, value);
    pos += run;
    value ^= 1;
  }
  if (pos != m.bits.size()) throw ValidationError("mask RLE does not cover the raster");
  return m;
}

std::vector<std::uint32_t> MaskBitmap::to_rle() const {
  std::vector<std::uint32_t> runs;
  std::uint8_t value = 0;
  std::uint32_t run = 0;
  for (std::uint8_t b : bits) {
    std::uint8_t v = b ? 1 : 0;
    if (v == value) {
      ++run;
    } else {
      runs.push_back(run);
      value = v;
      run = 1;
    }
  }
  runs.push_back(run);
  return runs;
}

std::size_t MaskBitmap::popcount() const {
  std::size_t n = 0;
  for (std::uint8_t b : bits) n += b ? 1 : 0;
  return n;
}

geom::NormalizedBox MaskBitmap::tight_bbox() const {
  int min_x = width, min_y = height, max_x = -1, max_y = -1;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!get(x, y)) continue;
      min_x = std::min(min_x, x);
      min_y = std::min(min_y, y);
      max_x = std::max(max_x, x);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) throw ValidationError("empty mask has no bounds");
  return geom::NormalizedBox(static_cast<double>(min_x) / width,
                             static_cast<double>(min_y) / height,
                             static_cast<double>(max_x + 1) / width,
                             static_cast<double>(max_y + 1) / height);
}

void InstanceDetection::validate() const {
  if (label.empty()) throw ValidationError("detection with empty label");
  if (mask.popcount() == 0) throw ValidationError("detection '" + label + "' has an empty mask");
  geom::NormalizedBox tight = mask.tight_bbox();
  auto close = [](double a, double b) { return std::abs(a - b) < 1e-9; };
  if (!(close(tight.x1, bbox.x1) && close(tight.y1, bbox.y1) && close(tight.x2, bbox.x2) &&
        close(tight.y2, bbox.y2))) {
    throw ValidationError("detection '" + label + "' bbox is not the tight bounds of its mask");
  }
}

std::vector<InstanceDetection> load_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open detections " + path);

  std::vector<InstanceDetection> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed JSON");
    }
    try {
      InstanceDetection d;
      auto face = geom::view_from_string(j.at("face").get<std::string>());
      if (!face) throw ValidationError("unknown face name");
      d.face = *face;
      d.label = j.at("label").get<std::string>();
      d.mask = MaskBitmap::from_rle(j.at("width").get<int>(), j.at("height").get<int>(),
                                    j.at("mask_rle").get<std::vector<std::uint32_t>>());
      const auto& b = j.at("bbox");
      d.bbox = geom::NormalizedBox(b.at(0).get<double>(), b.at(1).get<double>(),
                                   b.at(2).get<double>(), b.at(3).get<double>());
      d.validate();
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void save_detections(const std::vector<InstanceDetection>& dets, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write detections " + path);
  for (const InstanceDetection& d : dets) {
    json j;
    j["face"] = std::string(geom::to_string(d.face));
    j["label"] = d.label;
    j["width"] = d.mask.width;
    j["height"] = d.mask.height;
    j["mask_rle"] = d.mask.to_rle();
    j["bbox"] = json::array({d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2});
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("short write on " + path);
}

}  // namespace odibench::forge

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "odibench/geom/gnomonic.hpp"

namespace odibench::geom {

enum class ViewName { front, back, left, right, top, bottom };

inline constexpr std::array<ViewName, 6> kAllViews = {ViewName::front, ViewName::back,
                                                      ViewName::left,  ViewName::right,
                                                      ViewName::top,   ViewName::bottom};

std::string_view to_string(ViewName v);
std::optional<ViewName> view_from_string(std::string_view s);

// Canonical aim of each view: front (0,0), right (90,0), back (-180,0),
// left (-90,0), top (0,90), bottom (0,-90).
SphereDir canonical_dir(ViewName v);

// The six perspective views of the panorama, one per ViewName.
std::map<ViewName, Image> six_views(const ErpImage& erp, double fov_deg = 90.0,
                                    int out_size = 512, int threads = 1);

}  // namespace odibench::geom

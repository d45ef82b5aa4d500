#include "odibench/geom/view.hpp"

namespace odibench::geom {

std::string_view to_string(ViewName v) {
  switch (v) {
    case ViewName::front: return "front";
    case ViewName::back: return "back";
    case ViewName::left: return "left";
    case ViewName::right: return "right";
    case ViewName::top: return "top";
    case ViewName::bottom: return "bottom";
  }
  return "front";
}

std::optional<ViewName> view_from_string(std::string_view s) {
  for (ViewName v : kAllViews) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

SphereDir canonical_dir(ViewName v) {
  switch (v) {
    case ViewName::front: return {0, 0};
    case ViewName::right: return {90, 0};
    case ViewName::back: return {-180, 0};
    case ViewName::left: return {-90, 0};
    case ViewName::top: return {0, 90};
    case ViewName::bottom: return {0, -90};
  }
  return {0, 0};
}

std::map<ViewName, Image> six_views(const ErpImage& erp, double fov_deg, int out_size,
                                    int threads) {
  std::map<ViewName, Image> out;
  for (ViewName v : kAllViews) {
    out.emplace(v, gnomonic_render(erp, canonical_dir(v), fov_deg, out_size, out_size, threads));
  }
  return out;
}

}  // namespace odibench::geom

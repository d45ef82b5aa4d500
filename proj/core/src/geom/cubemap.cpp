#include "odibench/geom/cubemap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace odibench::geom {

namespace {

struct AxisFace {
  double value;
  ViewName positive;
  ViewName negative;
};

}  // namespace

ViewName cubemap_face_of(const Vec3& dir) {
  const AxisFace axes[3] = {
      {dir.x, ViewName::right, ViewName::left},
      {dir.y, ViewName::top, ViewName::bottom},
      {dir.z, ViewName::front, ViewName::back},
  };
  double best = std::max({std::abs(dir.x), std::abs(dir.y), std::abs(dir.z)});

  // Collect every face whose axis attains the dominant magnitude, then break
  // ties by name so boundary directions have a single owner.
  ViewName owner = ViewName::front;
  std::string_view owner_name;
  bool found = false;
  for (const AxisFace& a : axes) {
    if (std::abs(a.value) != best) continue;
    ViewName f = a.value >= 0 ? a.positive : a.negative;
    std::string_view name = to_string(f);
    if (!found || name < owner_name) {
      owner = f;
      owner_name = name;
      found = true;
    }
  }
  return owner;
}

ViewName cubemap_face_of(const SphereDir& dir) { return cubemap_face_of(dir.unit()); }

std::map<ViewName, Image> cubemap(const ErpImage& erp, int face_size, int threads) {
  if (face_size < 1) throw ValidationError("face size must be positive");
  return six_views(erp, 90.0, face_size, threads);
}

}  // namespace odibench::geom

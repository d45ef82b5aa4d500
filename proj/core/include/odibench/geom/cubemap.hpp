#pragma once

#include "odibench/geom/view.hpp"

namespace odibench::geom {

// Which cube face owns a direction. Faces partition the sphere by dominant
// axis; on boundaries where several axes tie, the face with the
// lexicographically smaller name wins, so every direction has exactly one
// owner.
ViewName cubemap_face_of(const Vec3& dir);
ViewName cubemap_face_of(const SphereDir& dir);

// Six square 90-degree faces, rendered like six_views at fov 90.
std::map<ViewName, Image> cubemap(const ErpImage& erp, int face_size, int threads = 1);

}  // namespace odibench::geom

#pragma once

#include <cmath>

#include "odibench/errors.hpp"

namespace odibench::geom {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle in degrees into [-180, 180).
inline double wrap_theta(double deg) {
  double t = std::fmod(deg + 180.0, 360.0);
  if (t < 0) t += 360.0;
  return t - 180.0;
}

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
};

// A viewing direction on the sphere, in degrees.
//
// theta is yaw, increasing to the viewer's right, normalized into
// [-180, 180); phi is pitch in [-90, 90], +90 straight up. The front
// direction is (0, 0) and maps to the center of an ERP image.
class SphereDir {
 public:
  SphereDir() = default;
  SphereDir(double theta_deg, double phi_deg) : theta_(wrap_theta(theta_deg)), phi_(phi_deg) {
    // Tolerate sub-nanodegree drift from upstream float math, nothing more.
    constexpr double eps = 1e-9;
    if (phi_ > 90.0 && phi_ <= 90.0 + eps) phi_ = 90.0;
    if (phi_ < -90.0 && phi_ >= -90.0 - eps) phi_ = -90.0;
    if (phi_ < -90.0 || phi_ > 90.0 || std::isnan(phi_) || std::isnan(theta_)) {
      throw ValidationError("pitch out of range [-90, 90]: " + std::to_string(phi_deg));
    }
  }

  double theta() const { return theta_; }
  double phi() const { return phi_; }

  // Unit vector in the world frame: +x right, +y up, +z front.
  Vec3 unit() const {
    double t = deg2rad(theta_), p = deg2rad(phi_);
    double cp = std::cos(p);
    return {cp * std::sin(t), std::sin(p), cp * std::cos(t)};
  }

  static SphereDir from_unit(const Vec3& v) {
    Vec3 u = v.normalized();
    double y = u.y;
    if (y > 1.0) y = 1.0;
    if (y < -1.0) y = -1.0;
    double phi = rad2deg(std::asin(y));
    double theta = (std::abs(u.x) < 1e-300 && std::abs(u.z) < 1e-300)
                       ? 0.0
                       : rad2deg(std::atan2(u.x, u.z));
    return {theta, phi};
  }

  bool operator==(const SphereDir& o) const = default;

 private:
  double theta_ = 0;
  double phi_ = 0;
};

// Great-circle separation between two directions, in degrees. The atan2
// form stays accurate for near-identical directions where acos degrades.
inline double angular_distance_deg(const SphereDir& a, const SphereDir& b) {
  Vec3 ua = a.unit(), ub = b.unit();
  return rad2deg(std::atan2(ua.cross(ub).norm(), ua.dot(ub)));
}

}  // namespace odibench::geom

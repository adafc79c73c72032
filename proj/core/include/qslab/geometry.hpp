#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qslab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

// Tolerances used across the library, collected in one place.
namespace tol {
inline constexpr double unit_norm = 1e-12;        // vertex normalization
inline constexpr double area_sum = 1e-12;         // mesh face areas sum to 1
inline constexpr double measure_sum = 1e-9;       // Reeb / arrangement measures
inline constexpr double balance_eta = 1e-9;       // median balance slack
inline constexpr double angle_eps = 1e-6;         // transversality (radians)
inline constexpr double point_eps = 1e-9;         // vertex merge (chord distance)
inline constexpr double linear_op = 1e-10;        // linearity / bilinearity
}  // namespace tol

struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    if (n == 0) throw error("cannot normalize zero vector");
    return *this / n;
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Angle between unit vectors, stable for nearly parallel inputs.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Signed spherical excess (solid angle) of the geodesic triangle abc on the
// unit sphere.  Positive when abc is counterclockwise seen from outside.
inline double spherical_triangle_excess(const Vec3& a, const Vec3& b, const Vec3& c) {
  double num = a.dot(b.cross(c));
  double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

inline double euclidean_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace qslab

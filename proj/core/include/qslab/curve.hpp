#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qslab/geometry.hpp"

namespace qslab {

/// Closed geodesic polyline on the unit sphere.  points[i] connects to
/// points[(i+1) % n]; consecutive points are distinct.  Self-intersections
/// (figure eights) are annotated as pairs of point indices mapping to the
/// same position.
struct CurveOnSphere {
  std::vector<Vec3> points;
  char color = 'R';  // R, G or B
  std::vector<std::array<int, 2>> self_intersections;

  int size() const { return static_cast<int>(points.size()); }
  const Vec3& point(int i) const { return points[((i % size()) + size()) % size()]; }
};

/// Great circle with the given pole (unit normal), sampled with n segments.
CurveOnSphere great_circle(const Vec3& pole, int segments = 360, char color = 'R');

/// Re-sample so that every segment subtends at most max_angle radians.
CurveOnSphere densify(const CurveOnSphere& curve, double max_angle = kPi / 180.0);

/// 3x3 rotation drawn uniformly from SO(3), a deterministic function of seed.
std::array<Vec3, 3> random_rotation(std::uint64_t seed);

CurveOnSphere rotate(const CurveOnSphere& curve, const std::array<Vec3, 3>& rot);

void validate_curve(const CurveOnSphere& curve);

}  // namespace qslab

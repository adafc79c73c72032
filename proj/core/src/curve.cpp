#include "qslab/curve.hpp"

#include <cmath>
#include <random>

namespace qslab {

CurveOnSphere great_circle(const Vec3& pole, int segments, char color) {
  if (segments < 3) throw error("great circle needs at least 3 segments");
  Vec3 n = pole.normalized();
  // Build an orthonormal frame (u, v, n).
  Vec3 ref = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 u = n.cross(ref).normalized();
  Vec3 v = n.cross(u);
  CurveOnSphere c;
  c.color = color;
  c.points.reserve(segments);
  for (int i = 0; i < segments; ++i) {
    double a = 2.0 * kPi * i / segments;
    c.points.push_back(u * std::cos(a) + v * std::sin(a));
  }
  return c;
}

CurveOnSphere densify(const CurveOnSphere& curve, double max_angle) {
  CurveOnSphere out;
  out.color = curve.color;
  int n = curve.size();
  std::vector<int> remap(n);
  for (int i = 0; i < n; ++i) {
    remap[i] = static_cast<int>(out.points.size());
    const Vec3& a = curve.points[i];
    const Vec3& b = curve.points[(i + 1) % n];
    double ang = angle_between(a, b);
    int pieces = std::max(1, static_cast<int>(std::ceil(ang / max_angle)));
    for (int k = 0; k < pieces; ++k) {
      double t = static_cast<double>(k) / pieces;
      // Slerp keeps the densified points on the original geodesic segment.
      Vec3 p = ang < 1e-14 ? a
                           : (a * std::sin((1 - t) * ang) + b * std::sin(t * ang)) /
                                 std::sin(ang);
      out.points.push_back(p.normalized());
    }
  }
  for (const auto& si : curve.self_intersections)
    out.self_intersections.push_back({remap[si[0]], remap[si[1]]});
  return out;
}

std::array<Vec3, 3> random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Gram-Schmidt on a Gaussian 3x3 gives a Haar-uniform rotation (up to sign fix).
  Vec3 a{gauss(rng), gauss(rng), gauss(rng)};
  Vec3 b{gauss(rng), gauss(rng), gauss(rng)};
  Vec3 e1 = a.normalized();
  Vec3 e2 = (b - e1 * e1.dot(b)).normalized();
  Vec3 e3 = e1.cross(e2);
  return {e1, e2, e3};
}

CurveOnSphere rotate(const CurveOnSphere& curve, const std::array<Vec3, 3>& rot) {
  CurveOnSphere out = curve;
  for (auto& p : out.points)
    p = rot[0] * p.x + rot[1] * p.y + rot[2] * p.z;
  return out;
}

void validate_curve(const CurveOnSphere& curve) {
  int n = curve.size();
  if (n < 3) throw error("curve has fewer than 3 points");
  for (int i = 0; i < n; ++i) {
    if (std::abs(curve.points[i].norm() - 1.0) > 1e-9)
      throw error("curve point not on the unit sphere");
    if ((curve.points[i] - curve.points[(i + 1) % n]).norm() < 1e-14)
      throw error("consecutive curve points coincide");
  }
}

}  // namespace qslab

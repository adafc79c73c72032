#pragma once

#include <array>
#include <string>
#include <vector>

#include "qslab/arrangement.hpp"
#include "qslab/mesh.hpp"

namespace qslab {

/// An immersed triangle bounded by arcs of the three input curves.
struct TriangleCandidate {
  std::array<Vec3, 3> corners;              // representative R/G, G/B, B/R points
  std::array<std::vector<int>, 3> sides;    // boundary darts by side
  std::vector<int> faces;                   // region faces (crossing construction)
  LoopSpec loop;                            // boundary walk (enumeration)
  double area = 0;
  std::string provenance;                   // crossing-construction | enumeration
};

/// Median test for a closed curve: every complementary component of the
/// sphere carries mass at most 1/2 (up to the rasterization tolerance).
struct MedianCheck {
  bool pass = false;
  std::vector<double> masses;
};
MedianCheck is_median(const TriMesh& mesh, const CurveOnSphere& curve);

/// A disk component of the complement of one arrangement curve, with the
/// chords the other curves cut through it.
struct ChordStructure {
  struct Chord {
    int curve = -1;
    std::vector<int> darts;  // consecutive darts crossing the disk
    int v_start = -1, v_end = -1;  // endpoints on the disk boundary
  };

  Arrangement arr;
  int disk_curve = -1;
  std::vector<char> in_delta;  // per face
  double delta_area = 0;
  std::vector<Chord> chords;
};

/// The component of the complement of curve `disk_curve` whose faces
/// contain `anchor_vertex`, together with all chords through it.
ChordStructure chord_structure(Arrangement arr, int disk_curve, int anchor_vertex);

/// Whether the endpoints of chord `a` lie in different components of the
/// disk cut by chord `b`.
bool detect_crossing(const ChordStructure& cs, int a, int b);

/// The four disjoint regions around the first crossing of the two chords,
/// each bounded by arcs of all three curves; sum of areas is at most the
/// disk area, so the smallest is at most a quarter of it.
std::vector<TriangleCandidate> crossing_triangles(const ChordStructure& cs, int a, int b);

/// All triangle candidates with bichromatic intersection corners and
/// monochromatic sides of at most `max_arcs_per_side` arcs, sorted by
/// (area, corner order).  Deterministically capped against blow-up.
std::vector<TriangleCandidate> enumerate_triangles(const Arrangement& arr,
                                                   int max_arcs_per_side);

/// Crossing construction first, enumeration fallback; returns a candidate
/// of area at most 1/8 + slack or throws a falsification error.
TriangleCandidate find_small_triangle(const CurveOnSphere& red, const CurveOnSphere& green,
                                      const CurveOnSphere& blue);

namespace tol {
inline constexpr double median_gate = 0.02;     // rasterized mass slack in is_median
inline constexpr double triangle_slack = 5e-3;  // acceptance slack on the 1/8 bound
}  // namespace tol

}  // namespace qslab

#pragma once

#include <string>
#include <vector>

#include "qslab/curve.hpp"

namespace qslab {

/// Planar-graph arrangement of closed curves on the sphere.  Vertices are
/// intersection points, arcs the maximal curve segments between them, faces
/// the complement components with normalized areas summing to 1.
///
/// Directed arcs ("darts") are encoded as 2*arc + (0 forward / 1 reverse);
/// face tracing keeps the face on the left of each dart.
struct Arrangement {
  struct Vertex {
    Vec3 position;
    std::vector<int> out_darts;  // sorted counterclockwise around the normal
    int passages = 0;            // curve passes through this vertex
    bool synthetic = false;      // degree-2 anchor on an isolated loop
  };
  struct Arc {
    int v_from, v_to;
    int curve;
    char color;
    std::vector<Vec3> points;  // endpoints included
  };
  struct Face {
    std::vector<int> darts;  // boundary cycle, face on the left
    double area = 0;         // normalized, faces sum to 1
  };

  std::vector<Vertex> vertices;
  std::vector<Arc> arcs;
  std::vector<Face> faces;
  std::vector<int> dart_face;                 // dart -> face on its left
  std::vector<std::vector<int>> curve_darts;  // forward darts in curve order

  static int dart(int arc, bool forward) { return 2 * arc + (forward ? 0 : 1); }
  static int dart_arc(int d) { return d / 2; }
  static bool dart_forward(int d) { return (d & 1) == 0; }
  static int twin(int d) { return d ^ 1; }

  int dart_from(int d) const {
    return dart_forward(d) ? arcs[dart_arc(d)].v_from : arcs[dart_arc(d)].v_to;
  }
  int dart_to(int d) const { return dart_from(twin(d)); }

  /// Successor around the face on the left of d.
  int next_dart(int d) const;

  /// Boundary of d's arc in travel order.
  std::vector<Vec3> dart_points(int d) const;
};

struct GeneralPositionReport {
  bool pass = true;
  std::vector<std::string> issues;
};

/// Build the full arrangement.  Throws on identical curves, disconnected
/// arrangements, or failed area accounting.
Arrangement intersect_curves(const std::vector<CurveOnSphere>& curves);

/// Transversality / triple-point audit (report-only).
GeneralPositionReport validate_general_position(const Arrangement& arr);

/// Closed walk through the arrangement, as a cyclic dart sequence.
struct LoopSpec {
  std::vector<int> darts;
};

/// Winding-number area: w per face by signed crossings from a base face,
/// normalized by w -= min(w), minimized over the two loop orientations.
double winding_area(const Arrangement& arr, const LoopSpec& loop);

}  // namespace qslab

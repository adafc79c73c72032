#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qslab/geometry.hpp"

namespace qslab {

/// Triangulated unit sphere.  Face areas are normalized spherical-excess
/// areas so they sum to exactly 1; euclid_total keeps the embedded
/// (Euclidean) total area for Poisson-bracket scaling.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;   // outward (CCW from outside) orientation
  std::vector<double> face_area;           // normalized, sums to 1
  double euclid_total = 0;

  // Derived connectivity, built once at construction.
  std::vector<std::vector<int>> vertex_neighbors;
  std::vector<std::vector<int>> vertex_faces;
  std::vector<std::array<int, 3>> face_neighbors;  // across edge opposite to corner i
  double max_edge_length = 0;
  int subdivisions = -1;  // as built by build_icosphere, -1 when unknown

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
  int edge_count() const { return vertex_count() + face_count() - 2; }  // Euler

  Vec3 face_barycenter(int f) const {
    const auto& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]).normalized();
  }
};

/// Icosahedron subdivided `subdivisions` times, vertices on the unit sphere.
/// Deterministic: identical input gives a bit-identical mesh.
TriMesh build_icosphere(int subdivisions);

/// Validates the mesh invariants (unit vertices, area sum, Euler characteristic).
/// Throws qslab::error on violation.
void validate_mesh(const TriMesh& mesh);

/// Sum of face_values[f] * face_area[f].
double integrate(const TriMesh& mesh, std::span<const double> face_values);

/// In-plane gradient of the PL interpolant of vertex values F on a face.
Vec3 face_gradient(const TriMesh& mesh, std::span<const double> values, int face);

}  // namespace qslab

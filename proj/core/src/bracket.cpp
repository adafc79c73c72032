#include "qslab/bracket.hpp"

#include <algorithm>
#include <cmath>

namespace qslab {

FaceField bracket(const TriMesh& mesh, const ScalarField& f, const ScalarField& g) {
  if (f.size() != mesh.vertex_count() || g.size() != mesh.vertex_count())
    throw error("bracket: fields do not match the mesh");
  FaceField out;
  out.values.resize(mesh.face_count());
  for (int fi = 0; fi < mesh.face_count(); ++fi) {
    const auto& t = mesh.faces[fi];
    Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    Vec3 n = (b - a).cross(c - a);
    double n_norm = n.norm();
    if (n_norm <= 0) throw error("bracket: degenerate face");
    Vec3 gf = face_gradient(mesh, f.values, fi);
    Vec3 gg = face_gradient(mesh, g.values, fi);
    out.values[fi] = gf.cross(gg).dot(n / n_norm) * mesh.euclid_total;
  }
  return out;
}

double sup_norm(const FaceField& b) {
  double m = 0;
  for (double v : b.values) m = std::max(m, std::abs(v));
  return m;
}

double l1_norm(const TriMesh& mesh, const FaceField& b) {
  if (b.size() != mesh.face_count()) throw error("l1_norm: face count mismatch");
  double s = 0;
  for (int f = 0; f < b.size(); ++f) s += std::abs(b.values[f]) * mesh.face_area[f];
  return s;
}

}  // namespace qslab

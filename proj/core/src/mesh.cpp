#include "qslab/mesh.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace qslab {

namespace {

void build_connectivity(TriMesh& mesh) {
  int nv = mesh.vertex_count();
  int nf = mesh.face_count();
  mesh.vertex_neighbors.assign(nv, {});
  mesh.vertex_faces.assign(nv, {});
  mesh.face_neighbors.assign(nf, {-1, -1, -1});

  std::map<std::pair<int, int>, std::pair<int, int>> edge_face;  // edge -> (face, corner)
  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.faces[f];
    for (int i = 0; i < 3; ++i) {
      int a = t[(i + 1) % 3], b = t[(i + 2) % 3];
      mesh.vertex_faces[a].push_back(f);
      auto key = std::minmax(a, b);
      auto it = edge_face.find({key.first, key.second});
      if (it == edge_face.end()) {
        edge_face[{key.first, key.second}] = {f, i};
        mesh.vertex_neighbors[a].push_back(b);
        mesh.vertex_neighbors[b].push_back(a);
      } else {
        mesh.face_neighbors[f][i] = it->second.first;
        mesh.face_neighbors[it->second.first][it->second.second] = f;
      }
    }
  }
  for (auto& nb : mesh.vertex_neighbors) std::sort(nb.begin(), nb.end());
  for (auto& vf : mesh.vertex_faces) std::sort(vf.begin(), vf.end());

  mesh.max_edge_length = 0;
  for (const auto& [edge, fc] : edge_face) {
    double len = angle_between(mesh.vertices[edge.first], mesh.vertices[edge.second]);
    mesh.max_edge_length = std::max(mesh.max_edge_length, len);
  }
}

void compute_areas(TriMesh& mesh) {
  int nf = mesh.face_count();
  mesh.face_area.resize(nf);
  mesh.euclid_total = 0;
  double total = 0;
  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.faces[f];
    double ex = spherical_triangle_excess(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                          mesh.vertices[t[2]]);
    if (ex <= 0) throw error("degenerate or inverted face in mesh");
    mesh.face_area[f] = ex;
    total += ex;
    mesh.euclid_total += euclidean_triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                                 mesh.vertices[t[2]]);
  }
  for (double& a : mesh.face_area) a /= total;
}

}  // namespace

TriMesh build_icosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 9)
    throw error("icosphere subdivisions must be in [0, 9]");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v = v.normalized();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find({key.first, key.second});
      if (it != midpoint.end()) return it->second;
      int idx = static_cast<int>(verts.size());
      verts.push_back((verts[a] + verts[b]).normalized());
      midpoint[{key.first, key.second}] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& t : faces) {
      int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriMesh mesh;
  mesh.vertices = std::move(verts);
  mesh.faces = std::move(faces);
  mesh.subdivisions = subdivisions;
  compute_areas(mesh);
  build_connectivity(mesh);
  validate_mesh(mesh);
  return mesh;
}

void validate_mesh(const TriMesh& mesh) {
  for (const auto& v : mesh.vertices)
    if (std::abs(v.norm() - 1.0) > tol::unit_norm)
      throw error("mesh vertex not on the unit sphere");
  double sum = 0;
  for (double a : mesh.face_area) sum += a;
  if (std::abs(sum - 1.0) > tol::area_sum)
    throw error("face areas do not sum to 1");
  long long V = mesh.vertex_count(), F = mesh.face_count();
  long long E = 3LL * F / 2;
  if (3LL * F % 2 != 0 || V - E + F != 2)
    throw error("mesh is not a closed genus-0 surface (Euler characteristic != 2)");
}

double integrate(const TriMesh& mesh, std::span<const double> face_values) {
  if (static_cast<int>(face_values.size()) != mesh.face_count())
    throw error("integrate: one value per face required");
  double sum = 0;
  for (int f = 0; f < mesh.face_count(); ++f) sum += face_values[f] * mesh.face_area[f];
  return sum;
}

Vec3 face_gradient(const TriMesh& mesh, std::span<const double> values, int face) {
  if (face < 0 || face >= mesh.face_count()) throw error("face index out of range");
  const auto& t = mesh.faces[face];
  const Vec3& v0 = mesh.vertices[t[0]];
  const Vec3& v1 = mesh.vertices[t[1]];
  const Vec3& v2 = mesh.vertices[t[2]];
  Vec3 e1 = v1 - v0, e2 = v2 - v0;
  Vec3 n = e1.cross(e2);
  double n2 = n.dot(n);
  if (n2 == 0) throw error("degenerate face");
  double d1 = values[t[1]] - values[t[0]];
  double d2 = values[t[2]] - values[t[0]];
  // Solve g . e1 = d1, g . e2 = d2, g . n = 0.
  Vec3 g = (e2.cross(n) * d1 + n.cross(e1) * d2) / n2;
  return g;
}

}  // namespace qslab

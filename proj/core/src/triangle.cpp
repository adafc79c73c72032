#include "qslab/triangle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace qslab {

namespace {

// Do two minor-arc geodesic segments intersect?
bool segments_cross(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Vec3 n1 = a.cross(b), n2 = c.cross(d);
  double l1 = n1.norm(), l2 = n2.norm();
  if (l1 <= 0 || l2 <= 0) return false;
  n1 = n1 / l1;
  n2 = n2 / l2;
  Vec3 line = n1.cross(n2);
  double ll = line.norm();
  if (ll < 1e-12) return false;
  line = line / ll;
  const double tol = 1e-12;
  for (Vec3 x : {line, line * -1.0}) {
    if (a.cross(x).dot(n1) < -tol || x.cross(b).dot(n1) < -tol) continue;
    if (c.cross(x).dot(n2) < -tol || x.cross(d).dot(n2) < -tol) continue;
    return true;
  }
  return false;
}

bool point_in_face(const TriMesh& mesh, int f, const Vec3& p) {
  const auto& t = mesh.faces[f];
  for (int i = 0; i < 3; ++i) {
    const Vec3& u = mesh.vertices[t[i]];
    const Vec3& v = mesh.vertices[t[(i + 1) % 3]];
    if (u.cross(v).dot(p) < -1e-12) return false;
  }
  return true;
}

// Connected components of arrangement faces, with some arcs acting as
// walls; faces outside `keep` (when given) stay unlabeled (-1).  Labels are
// assigned in face-index order for determinism.
std::vector<int> face_components(const Arrangement& arr, const std::vector<char>& wall_arc,
                                 const std::vector<char>* keep) {
  int nf = static_cast<int>(arr.faces.size());
  std::vector<std::vector<int>> adj(nf);
  for (int a = 0; a < static_cast<int>(arr.arcs.size()); ++a) {
    if (wall_arc[a]) continue;
    int fl = arr.dart_face[Arrangement::dart(a, true)];
    int fr = arr.dart_face[Arrangement::dart(a, false)];
    adj[fl].push_back(fr);
    adj[fr].push_back(fl);
  }
  std::vector<int> label(nf, -1);
  int next = 0;
  for (int f0 = 0; f0 < nf; ++f0) {
    if (label[f0] >= 0 || (keep && !(*keep)[f0])) continue;
    int lab = next++;
    std::vector<int> stack = {f0};
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      if (label[f] >= 0) continue;
      if (keep && !(*keep)[f]) continue;
      label[f] = lab;
      for (int g : adj[f]) stack.push_back(g);
    }
  }
  return label;
}

std::set<int> vertex_curves(const Arrangement& arr, int v) {
  std::set<int> out;
  for (int d : arr.vertices[v].out_darts) out.insert(arr.arcs[Arrangement::dart_arc(d)].curve);
  return out;
}

bool corner_less(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
  for (int i = 0; i < 3; ++i) {
    auto ta = std::array{a[i].x, a[i].y, a[i].z};
    auto tb = std::array{b[i].x, b[i].y, b[i].z};
    if (ta != tb) return ta < tb;
  }
  return false;
}

bool candidate_less(const TriangleCandidate& a, const TriangleCandidate& b) {
  if (a.area != b.area) return a.area < b.area;
  return corner_less(a.corners, b.corners);
}

// Turn a labeled face region into a candidate: area, boundary darts by
// curve, representative bichromatic corners.
TriangleCandidate region_candidate(const Arrangement& arr, const std::vector<int>& label,
                                   int lab) {
  TriangleCandidate cand;
  cand.provenance = "crossing-construction";
  std::set<int> boundary_vertices;
  for (int f = 0; f < static_cast<int>(arr.faces.size()); ++f) {
    if (label[f] != lab) continue;
    cand.faces.push_back(f);
    cand.area += arr.faces[f].area;
    for (int d : arr.faces[f].darts) {
      if (label[arr.dart_face[Arrangement::twin(d)]] == lab) continue;
      int curve = arr.arcs[Arrangement::dart_arc(d)].curve;
      if (curve >= 0 && curve < 3) cand.sides[curve].push_back(d);
      boundary_vertices.insert(arr.dart_from(d));
      boundary_vertices.insert(arr.dart_to(d));
    }
  }
  // Corner k sits on the two curves other than k's opposite; fall back to
  // any boundary vertex when a pair is not represented.
  std::array<std::pair<int, int>, 3> pairs = {{{0, 1}, {1, 2}, {2, 0}}};
  for (int k = 0; k < 3; ++k) {
    int found = -1;
    for (int v : boundary_vertices) {
      auto cs = vertex_curves(arr, v);
      if (cs.count(pairs[k].first) && cs.count(pairs[k].second)) {
        found = v;
        break;
      }
    }
    if (found < 0 && !boundary_vertices.empty()) found = *boundary_vertices.begin();
    if (found >= 0) cand.corners[k] = arr.vertices[found].position;
  }
  return cand;
}

}  // namespace

MedianCheck is_median(const TriMesh& mesh, const CurveOnSphere& curve) {
  validate_curve(curve);
  int nf = mesh.face_count();

  // Coarse spatial bins over (z, phi) for curve-face proximity queries.
  const int nz = 48, np = 96;
  std::vector<std::vector<int>> bins(nz * np);
  auto zcell = [&](double z) { return std::clamp(static_cast<int>((z + 1) / 2 * nz), 0, nz - 1); };
  auto pcell = [&](double phi) {
    return ((static_cast<int>(std::floor((phi + kPi) / (2 * kPi) * np)) % np) + np) % np;
  };
  for (int f = 0; f < nf; ++f) {
    Vec3 bc = mesh.face_barycenter(f);
    bins[zcell(bc.z) * np + pcell(std::atan2(bc.y, bc.x))].push_back(f);
  }

  std::vector<char> blocked(nf, 0);
  double reach = mesh.max_edge_length;
  for (int s = 0; s < curve.size(); ++s) {
    Vec3 a = curve.point(s), b = curve.point(s + 1);
    Vec3 mid = ((a + b) / 2).normalized();
    double rad = (b - a).norm() / 2 + 2 * reach;
    int z0 = zcell(mid.z - rad), z1 = zcell(mid.z + rad);
    double horiz = std::sqrt(std::max(1e-12, 1 - mid.z * mid.z));
    int pspan = horiz < 2 * rad ? np / 2 : static_cast<int>(rad / horiz / (2 * kPi) * np) + 2;
    int pc = pcell(std::atan2(mid.y, mid.x));
    for (int zi = z0; zi <= z1; ++zi)
      for (int dp = -pspan; dp <= pspan; ++dp) {
        for (int f : bins[zi * np + ((pc + dp) % np + np) % np]) {
          if (blocked[f]) continue;
          if ((mesh.face_barycenter(f) - mid).norm() > rad) continue;
          bool hit = point_in_face(mesh, f, a) || point_in_face(mesh, f, b);
          const auto& t = mesh.faces[f];
          for (int e = 0; !hit && e < 3; ++e)
            hit = segments_cross(a, b, mesh.vertices[t[e]], mesh.vertices[t[(e + 1) % 3]]);
          if (hit) blocked[f] = 1;
        }
      }
  }

  // Flood the open faces, then attach the blocked band layer by layer.
  std::vector<int> label(nf, -1);
  int ncomp = 0;
  for (int f0 = 0; f0 < nf; ++f0) {
    if (label[f0] >= 0 || blocked[f0]) continue;
    int lab = ncomp++;
    std::vector<int> stack = {f0};
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      if (label[f] >= 0 || blocked[f]) continue;
      label[f] = lab;
      for (int g : mesh.face_neighbors[f]) stack.push_back(g);
    }
  }
  if (ncomp == 0) throw error("curve blocks the whole mesh (mesh too coarse)");
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<int, int>> updates;
    for (int f = 0; f < nf; ++f) {
      if (label[f] >= 0) continue;
      int best = -1;
      for (int g : mesh.face_neighbors[f])
        if (label[g] >= 0 && (best < 0 || label[g] < best)) best = label[g];
      if (best >= 0) updates.push_back({f, best});
    }
    for (auto& [f, lab] : updates) {
      label[f] = lab;
      grew = true;
    }
  }

  MedianCheck check;
  check.masses.assign(ncomp, 0.0);
  for (int f = 0; f < nf; ++f) check.masses[label[f]] += mesh.face_area[f];
  check.pass = true;
  for (double m : check.masses)
    if (m > 0.5 + tol::median_gate) check.pass = false;
  return check;
}

ChordStructure chord_structure(Arrangement arr, int disk_curve, int anchor_vertex) {
  ChordStructure cs;
  cs.arr = std::move(arr);
  cs.disk_curve = disk_curve;
  const Arrangement& a = cs.arr;

  std::vector<char> wall(a.arcs.size(), 0);
  for (size_t i = 0; i < a.arcs.size(); ++i) wall[i] = a.arcs[i].curve == disk_curve;
  auto label = face_components(a, wall, nullptr);
  int anchor_face = a.dart_face[a.vertices[anchor_vertex].out_darts.at(0)];
  int lab = label[anchor_face];
  cs.in_delta.assign(a.faces.size(), 0);
  for (size_t f = 0; f < a.faces.size(); ++f) {
    cs.in_delta[f] = label[f] == lab;
    if (cs.in_delta[f]) cs.delta_area += a.faces[f].area;
  }

  std::vector<char> on_disk(a.vertices.size(), 0);
  for (const auto& arc : a.arcs)
    if (arc.curve == disk_curve) on_disk[arc.v_from] = on_disk[arc.v_to] = 1;

  for (int c = 0; c < static_cast<int>(a.curve_darts.size()); ++c) {
    if (c == disk_curve) continue;
    const auto& seq = a.curve_darts[c];
    int n = static_cast<int>(seq.size());
    int start = -1;
    for (int k = 0; k < n; ++k)
      if (on_disk[a.dart_from(seq[k])]) {
        start = k;
        break;
      }
    if (start < 0) continue;  // curve never meets the disk boundary
    ChordStructure::Chord chord;
    for (int step = 0; step <= n; ++step) {
      int d = seq[(start + step) % n];
      if (step > 0 && on_disk[a.dart_from(d)]) {
        chord.v_start = a.dart_from(chord.darts.front());
        chord.v_end = a.dart_to(chord.darts.back());
        if (cs.in_delta[a.dart_face[chord.darts.front()]] ||
            cs.in_delta[a.dart_face[Arrangement::twin(chord.darts.front())]])
          cs.chords.push_back(chord);
        chord = {};
        chord.curve = c;
        if (step == n) break;
      }
      chord.curve = c;
      chord.darts.push_back(d);
    }
  }
  return cs;
}

namespace {

std::vector<char> chord_wall(const ChordStructure& cs,
                             const std::vector<const ChordStructure::Chord*>& chords) {
  const Arrangement& a = cs.arr;
  std::vector<char> wall(a.arcs.size(), 0);
  for (size_t i = 0; i < a.arcs.size(); ++i) wall[i] = a.arcs[i].curve == cs.disk_curve;
  for (const auto* ch : chords)
    for (int d : ch->darts) wall[Arrangement::dart_arc(d)] = 1;
  return wall;
}

int endpoint_label(const ChordStructure& cs, const std::vector<int>& label, int v) {
  for (int d : cs.arr.vertices[v].out_darts) {
    int f = cs.arr.dart_face[d];
    if (cs.in_delta[f] && label[f] >= 0) return label[f];
  }
  throw error("chord endpoint has no face inside the disk");
}

}  // namespace

bool detect_crossing(const ChordStructure& cs, int a, int b) {
  const auto& ca = cs.chords.at(a);
  const auto& cb = cs.chords.at(b);
  auto wall = chord_wall(cs, {&cb});
  auto label = face_components(cs.arr, wall, &cs.in_delta);
  return endpoint_label(cs, label, ca.v_start) != endpoint_label(cs, label, ca.v_end);
}

std::vector<TriangleCandidate> crossing_triangles(const ChordStructure& cs, int a, int b) {
  const Arrangement& arr = cs.arr;
  const auto& ca = cs.chords.at(a);
  const auto& cb = cs.chords.at(b);

  std::set<int> b_vertices;
  for (int d : cb.darts) {
    b_vertices.insert(arr.dart_from(d));
    b_vertices.insert(arr.dart_to(d));
  }
  b_vertices.erase(cb.v_start);
  b_vertices.erase(cb.v_end);
  int x = -1;
  for (int d : ca.darts) {
    if (b_vertices.count(arr.dart_to(d))) {
      x = arr.dart_to(d);
      break;
    }
  }
  if (x < 0) throw error("chords do not cross (run detect_crossing first)");

  auto wall = chord_wall(cs, {&ca, &cb});
  auto label = face_components(cs.arr, wall, &cs.in_delta);
  std::vector<int> labs;
  for (int d : arr.vertices[x].out_darts) {
    int f = arr.dart_face[d];
    if (!cs.in_delta[f] || label[f] < 0) continue;
    if (std::find(labs.begin(), labs.end(), label[f]) == labs.end()) labs.push_back(label[f]);
  }
  if (labs.size() != 4)
    throw error("degenerate crossing: expected four wedge regions, found " +
                std::to_string(labs.size()));
  std::vector<TriangleCandidate> out;
  for (int lab : labs) out.push_back(region_candidate(arr, label, lab));
  std::sort(out.begin(), out.end(), candidate_less);
  return out;
}

std::vector<TriangleCandidate> enumerate_triangles(const Arrangement& arr,
                                                   int max_arcs_per_side) {
  std::vector<TriangleCandidate> out;
  std::set<int> curves;
  for (const auto& arc : arr.arcs) curves.insert(arc.curve);
  if (curves.size() < 3) return out;

  int nv = static_cast<int>(arr.vertices.size());
  std::vector<std::set<int>> vc(nv);
  for (int v = 0; v < nv; ++v) vc[v] = vertex_curves(arr, v);
  std::array<std::vector<int>, 3> corner_sets;  // RG, GB, BR vertices
  std::array<std::pair<int, int>, 3> pairs = {{{0, 1}, {1, 2}, {2, 0}}};
  for (int k = 0; k < 3; ++k)
    for (int v = 0; v < nv; ++v)
      if (vc[v].count(pairs[k].first) && vc[v].count(pairs[k].second))
        corner_sets[k].push_back(v);

  // All dart walks of one curve from a vertex, up to the length cap, no
  // dart reuse within a walk.
  auto walks = [&](int curve, int from) {
    std::map<int, std::vector<std::vector<int>>> by_end;
    std::vector<int> path;
    std::set<int> used;
    auto dfs = [&](auto&& self, int v) -> void {
      if (!path.empty()) by_end[v].push_back(path);
      if (static_cast<int>(path.size()) >= max_arcs_per_side) return;
      for (int d : arr.vertices[v].out_darts) {
        if (arr.arcs[Arrangement::dart_arc(d)].curve != curve) continue;
        if (used.count(Arrangement::dart_arc(d))) continue;
        used.insert(Arrangement::dart_arc(d));
        path.push_back(d);
        self(self, arr.dart_to(d));
        path.pop_back();
        used.erase(Arrangement::dart_arc(d));
      }
    };
    dfs(dfs, from);
    return by_end;
  };

  const size_t cap = 50000;
  for (int p1 : corner_sets[0]) {
    auto g_walks = walks(1, p1);
    for (int p2 : corner_sets[1]) {
      if (!g_walks.count(p2)) continue;
      auto b_walks = walks(2, p2);
      for (int p3 : corner_sets[2]) {
        if (!b_walks.count(p3)) continue;
        auto r_walks = walks(0, p3);
        if (!r_walks.count(p1)) continue;
        for (const auto& sg : g_walks[p2])
          for (const auto& sb : b_walks[p3])
            for (const auto& sr : r_walks[p1]) {
              if (out.size() >= cap) goto done;
              TriangleCandidate cand;
              cand.provenance = "enumeration";
              cand.corners = {arr.vertices[p1].position, arr.vertices[p2].position,
                              arr.vertices[p3].position};
              cand.sides = {sr, sg, sb};
              cand.loop.darts = sg;
              cand.loop.darts.insert(cand.loop.darts.end(), sb.begin(), sb.end());
              cand.loop.darts.insert(cand.loop.darts.end(), sr.begin(), sr.end());
              cand.area = winding_area(arr, cand.loop);
              out.push_back(std::move(cand));
            }
      }
    }
  }
done:
  std::sort(out.begin(), out.end(), candidate_less);
  return out;
}

TriangleCandidate find_small_triangle(const CurveOnSphere& red, const CurveOnSphere& green,
                                      const CurveOnSphere& blue) {
  std::vector<CurveOnSphere> curves = {red, green, blue};
  const char tags[3] = {'R', 'G', 'B'};
  for (int i = 0; i < 3; ++i) {
    curves[i].color = tags[i];
    curves[i] = densify(curves[i], kPi / 180);
  }
  Arrangement arr = intersect_curves(curves);
  auto gp = validate_general_position(arr);
  if (!gp.pass) throw error("general-position failure: " + gp.issues.front());

  // Step one: a disk of the green complement through a red/blue point.
  int anchor = -1;
  for (size_t v = 0; v < arr.vertices.size(); ++v) {
    auto cs = vertex_curves(arr, static_cast<int>(v));
    if (cs.count(0) && cs.count(2)) {
      anchor = static_cast<int>(v);
      break;
    }
  }
  if (anchor >= 0) {
    ChordStructure cs = chord_structure(std::move(arr), 1, anchor);
    int chord_r = -1, chord_b = -1;
    for (size_t i = 0; i < cs.chords.size(); ++i) {
      bool through = false;
      for (int d : cs.chords[i].darts) through |= cs.arr.dart_from(d) == anchor;
      if (!through) continue;
      if (cs.chords[i].curve == 0) chord_r = static_cast<int>(i);
      if (cs.chords[i].curve == 2) chord_b = static_cast<int>(i);
    }
    if (chord_r >= 0 && chord_b >= 0 && detect_crossing(cs, chord_r, chord_b)) {
      auto cands = crossing_triangles(cs, chord_r, chord_b);
      if (!cands.empty() && cands.front().area <= 0.125 + tol::triangle_slack)
        return cands.front();
    }
    arr = std::move(cs.arr);
  }

  // Fallback: systematic enumeration with growing side complexity.
  for (int k = 1; k <= 6; ++k) {
    auto cands = enumerate_triangles(arr, k);
    for (const auto& cand : cands)
      if (cand.area <= 0.125 + tol::triangle_slack) return cand;
  }
  throw error("falsification event: no triangle of area <= 1/8 + " +
              std::to_string(tol::triangle_slack) + " found");
}

}  // namespace qslab

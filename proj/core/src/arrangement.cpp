#include "qslab/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

namespace qslab {

namespace {

constexpr double kMergeEps = 1e-7;  // chord radius for snapping intersection points

// Tangent direction at p towards q, in the tangent plane of p.
Vec3 tangent_toward(const Vec3& p, const Vec3& q) {
  Vec3 t = q - p * p.dot(q);
  double n = t.norm();
  if (n <= 0) throw error("tangent of coincident points");
  return t / n;
}

struct SegHit {
  Vec3 p;
  double ta, tb;  // parameters within the two segments
};

// Minor-arc geodesic segment intersection.
std::optional<SegHit> intersect_segments(const Vec3& a, const Vec3& b, const Vec3& c,
                                         const Vec3& d) {
  Vec3 n1 = a.cross(b), n2 = c.cross(d);
  double l1 = n1.norm(), l2 = n2.norm();
  if (l1 <= 0 || l2 <= 0) return std::nullopt;
  n1 = n1 / l1;
  n2 = n2 / l2;
  Vec3 line = n1.cross(n2);
  double ll = line.norm();
  if (ll < 1e-12) return std::nullopt;  // (near-)coplanar segments
  line = line / ll;
  const double tol = 1e-12;
  for (Vec3 x : {line, line * -1.0}) {
    if (a.cross(x).dot(n1) < -tol || x.cross(b).dot(n1) < -tol) continue;
    if (c.cross(x).dot(n2) < -tol || x.cross(d).dot(n2) < -tol) continue;
    SegHit hit;
    hit.p = x;
    hit.ta = angle_between(a, x) / std::max(angle_between(a, b), 1e-300);
    hit.tb = angle_between(c, x) / std::max(angle_between(c, d), 1e-300);
    hit.ta = std::clamp(hit.ta, 0.0, 1.0);
    hit.tb = std::clamp(hit.tb, 0.0, 1.0);
    return hit;
  }
  return std::nullopt;
}

struct Passage {
  double pos;  // segment index + parameter, cyclic along the curve
  int vertex;
};

}  // namespace

int Arrangement::next_dart(int d) const {
  int v = dart_to(d);
  int t = twin(d);
  const auto& out = vertices[v].out_darts;
  auto it = std::find(out.begin(), out.end(), t);
  if (it == out.end()) throw error("inconsistent arrangement incidence");
  size_t idx = it - out.begin();
  return out[(idx + out.size() - 1) % out.size()];
}

std::vector<Vec3> Arrangement::dart_points(int d) const {
  std::vector<Vec3> pts = arcs[dart_arc(d)].points;
  if (!dart_forward(d)) std::reverse(pts.begin(), pts.end());
  return pts;
}

Arrangement intersect_curves(const std::vector<CurveOnSphere>& curves) {
  if (curves.empty()) throw error("no curves");
  for (const auto& c : curves) validate_curve(c);
  for (size_t i = 0; i < curves.size(); ++i)
    for (size_t j = i + 1; j < curves.size(); ++j) {
      if (curves[i].size() != curves[j].size()) continue;
      bool same = true;
      for (int k = 0; same && k < curves[i].size(); ++k)
        same = (curves[i].points[k] - curves[j].points[k]).norm() < kMergeEps;
      if (same) throw error("identical curves in the arrangement input");
    }

  Arrangement arr;
  auto add_vertex = [&](const Vec3& p) {
    for (size_t k = 0; k < arr.vertices.size(); ++k)
      if ((arr.vertices[k].position - p).norm() < kMergeEps) return static_cast<int>(k);
    arr.vertices.push_back({p, {}, 0, false});
    return static_cast<int>(arr.vertices.size() - 1);
  };

  // Segment bounding data for the pair prefilter.
  struct SegBound {
    Vec3 mid;
    double radius;
  };
  std::vector<std::vector<SegBound>> bounds(curves.size());
  for (size_t c = 0; c < curves.size(); ++c) {
    bounds[c].resize(curves[c].size());
    for (int s = 0; s < curves[c].size(); ++s) {
      Vec3 a = curves[c].point(s), b = curves[c].point(s + 1);
      bounds[c][s] = {((a + b) / 2).normalized(), (b - a).norm() / 2 + kMergeEps};
    }
  }

  std::vector<std::vector<Passage>> passages(curves.size());
  auto record = [&](int curve, int seg, double t, int vertex) {
    passages[curve].push_back({seg + t, vertex});
  };

  // Cross-curve intersections.
  for (size_t ca = 0; ca < curves.size(); ++ca)
    for (size_t cb = ca + 1; cb < curves.size(); ++cb)
      for (int sa = 0; sa < curves[ca].size(); ++sa)
        for (int sb = 0; sb < curves[cb].size(); ++sb) {
          if ((bounds[ca][sa].mid - bounds[cb][sb].mid).norm() >
              bounds[ca][sa].radius + bounds[cb][sb].radius)
            continue;
          auto hit = intersect_segments(curves[ca].point(sa), curves[ca].point(sa + 1),
                                        curves[cb].point(sb), curves[cb].point(sb + 1));
          if (!hit) continue;
          int v = add_vertex(hit->p);
          record(static_cast<int>(ca), sa, hit->ta, v);
          record(static_cast<int>(cb), sb, hit->tb, v);
        }

  // Self-intersections: annotated crossing points first, then a geometric
  // scan for any that tracing did not annotate.
  for (size_t c = 0; c < curves.size(); ++c) {
    std::vector<Vec3> annotated;
    for (const auto& si : curves[c].self_intersections) {
      int v = add_vertex(curves[c].point(si[0]));
      record(static_cast<int>(c), si[0], 0.0, v);
      record(static_cast<int>(c), si[1], 0.0, v);
      annotated.push_back(curves[c].point(si[0]));
    }
    int n = curves[c].size();
    for (int sa = 0; sa < n; ++sa)
      for (int sb = sa + 2; sb < n; ++sb) {
        if (sa == 0 && sb == n - 1) continue;  // cyclically adjacent
        if ((bounds[c][sa].mid - bounds[c][sb].mid).norm() >
            bounds[c][sa].radius + bounds[c][sb].radius)
          continue;
        auto hit = intersect_segments(curves[c].point(sa), curves[c].point(sa + 1),
                                      curves[c].point(sb), curves[c].point(sb + 1));
        if (!hit) continue;
        // Reject grazing hits at the shared boundary of nearby segments.
        double pa = sa + hit->ta, pb = sb + hit->tb;
        double gap = std::min(std::abs(pb - pa), n - std::abs(pb - pa));
        if (gap < 2.0) continue;
        bool known = false;
        for (const auto& q : annotated)
          if ((q - hit->p).norm() < kMergeEps) known = true;
        if (known) continue;
        int v = add_vertex(hit->p);
        record(static_cast<int>(c), sa, hit->ta, v);
        record(static_cast<int>(c), sb, hit->tb, v);
      }
  }

  // Cut each curve into arcs between consecutive passages.
  arr.curve_darts.resize(curves.size());
  for (size_t c = 0; c < curves.size(); ++c) {
    auto& ps = passages[c];
    int n = curves[c].size();
    if (ps.empty()) {
      int v = add_vertex(curves[c].point(0));
      arr.vertices[v].synthetic = true;
      ps.push_back({0.0, v});
    }
    std::sort(ps.begin(), ps.end(), [](const Passage& a, const Passage& b) {
      return a.pos < b.pos;
    });
    // Merge duplicate reports of one passage (hits shared by neighboring
    // segments land at the same vertex with nearly equal positions).
    std::vector<Passage> uniq;
    for (const auto& p : ps) {
      if (!uniq.empty() && p.vertex == uniq.back().vertex && p.pos - uniq.back().pos < 0.5)
        continue;
      uniq.push_back(p);
    }
    if (uniq.size() > 1 && uniq.front().vertex == uniq.back().vertex &&
        uniq.front().pos + n - uniq.back().pos < 0.5)
      uniq.pop_back();
    ps = std::move(uniq);
    for (const auto& p : ps) ++arr.vertices[p.vertex].passages;

    for (size_t k = 0; k < ps.size(); ++k) {
      const Passage& from = ps[k];
      const Passage& to = ps[(k + 1) % ps.size()];
      double pos_end = to.pos + (k + 1 == ps.size() ? n : 0);
      Arrangement::Arc arc;
      arc.v_from = from.vertex;
      arc.v_to = to.vertex;
      arc.curve = static_cast<int>(c);
      arc.color = curves[c].color;
      arc.points.push_back(arr.vertices[from.vertex].position);
      for (int idx = static_cast<int>(std::floor(from.pos)) + 1; idx <= pos_end; ++idx) {
        if (idx > pos_end - 1e-9) break;
        Vec3 q = curves[c].point(idx);
        if ((q - arc.points.back()).norm() < kMergeEps) continue;
        if ((q - arr.vertices[to.vertex].position).norm() < kMergeEps) continue;
        arc.points.push_back(q);
      }
      arc.points.push_back(arr.vertices[to.vertex].position);
      if (arc.points.size() < 2 ||
          (arc.points.size() == 2 && (arc.points[0] - arc.points[1]).norm() < kMergeEps))
        throw error("degenerate arrangement arc");
      int aid = static_cast<int>(arr.arcs.size());
      arr.arcs.push_back(std::move(arc));
      arr.curve_darts[c].push_back(Arrangement::dart(aid, true));
    }
  }

  // Angular order of outgoing darts at each vertex.
  auto dart_dir = [&](int d) {
    auto pts = arr.dart_points(d);
    const Vec3& p = pts[0];
    for (size_t i = 1; i < pts.size(); ++i)
      if ((pts[i] - p).norm() > 1e-9) return tangent_toward(p, pts[i]);
    throw error("arc with no extent");
  };
  for (int a = 0; a < static_cast<int>(arr.arcs.size()); ++a) {
    arr.vertices[arr.arcs[a].v_from].out_darts.push_back(Arrangement::dart(a, true));
    arr.vertices[arr.arcs[a].v_to].out_darts.push_back(Arrangement::dart(a, false));
  }
  for (auto& v : arr.vertices) {
    Vec3 n = v.position;
    Vec3 u1 = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    u1 = (u1 - n * n.dot(u1)).normalized();
    Vec3 u2 = n.cross(u1);
    std::vector<std::pair<double, int>> order;
    for (int d : v.out_darts) {
      Vec3 dir = dart_dir(d);
      order.push_back({std::atan2(dir.dot(u2), dir.dot(u1)), d});
    }
    std::sort(order.begin(), order.end());
    v.out_darts.clear();
    for (auto& [ang, d] : order) v.out_darts.push_back(d);
  }

  // Face tracing: each unvisited dart starts a boundary cycle with the face
  // on its left.
  arr.dart_face.assign(2 * arr.arcs.size(), -1);
  for (int d0 = 0; d0 < static_cast<int>(arr.dart_face.size()); ++d0) {
    if (arr.dart_face[d0] >= 0) continue;
    int fid = static_cast<int>(arr.faces.size());
    Arrangement::Face face;
    int d = d0;
    do {
      arr.dart_face[d] = fid;
      face.darts.push_back(d);
      d = arr.next_dart(d);
      if (face.darts.size() > 4 * arr.arcs.size() + 8)
        throw error("face tracing did not close");
    } while (d != d0);

    // Gauss-Bonnet: area of a geodesic polygon = 2*pi - sum of turning
    // angles; normalized by the sphere area 4*pi.
    std::vector<Vec3> boundary;
    for (int bd : face.darts) {
      auto pts = arr.dart_points(bd);
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (boundary.empty() || (pts[i] - boundary.back()).norm() > 1e-12)
          boundary.push_back(pts[i]);
      }
    }
    while (boundary.size() > 1 && (boundary.back() - boundary.front()).norm() <= 1e-12)
      boundary.pop_back();
    if (boundary.size() < 2) throw error("degenerate face boundary");
    double turning = 0;
    int m = static_cast<int>(boundary.size());
    for (int i = 0; i < m; ++i) {
      const Vec3& a = boundary[(i + m - 1) % m];
      const Vec3& b = boundary[i];
      const Vec3& cpt = boundary[(i + 1) % m];
      Vec3 in_dir = tangent_toward(b, a) * -1.0;
      Vec3 out_dir = tangent_toward(b, cpt);
      turning += std::atan2(in_dir.cross(out_dir).dot(b), in_dir.dot(out_dir));
    }
    face.area = (2 * kPi - turning) / kFourPi;
    arr.faces.push_back(std::move(face));
  }

  // Sanity: connectivity, Euler formula, unit total area.
  {
    std::vector<char> seen(arr.vertices.size(), 0);
    std::vector<int> stack = {0};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = 1;
      for (int d : arr.vertices[v].out_darts) stack.push_back(arr.dart_to(d));
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw error("disconnected arrangement (curves do not all intersect)");
  }
  long euler = static_cast<long>(arr.vertices.size()) -
               static_cast<long>(arr.arcs.size()) + static_cast<long>(arr.faces.size());
  if (euler != 2) throw error("arrangement Euler characteristic is not 2");
  double total = 0;
  for (const auto& f : arr.faces) total += f.area;
  if (std::abs(total - 1.0) > tol::measure_sum * 1e3)
    throw error("arrangement face areas do not sum to 1");
  // Distribute the numeric residue so downstream sums are exact.
  for (auto& f : arr.faces) f.area /= total;
  return arr;
}

GeneralPositionReport validate_general_position(const Arrangement& arr) {
  GeneralPositionReport report;
  auto complain = [&](std::string msg) {
    report.pass = false;
    report.issues.push_back(std::move(msg));
  };

  // Straight-through continuation pairs are exempt from the tangency check.
  std::set<std::pair<int, int>> continuation;
  for (const auto& seq : arr.curve_darts)
    for (size_t k = 0; k < seq.size(); ++k) {
      int incoming = Arrangement::twin(seq[k]);
      int outgoing = seq[(k + 1) % seq.size()];
      continuation.insert({std::min(incoming, outgoing), std::max(incoming, outgoing)});
    }

  for (size_t vi = 0; vi < arr.vertices.size(); ++vi) {
    const auto& v = arr.vertices[vi];
    if (v.synthetic) continue;
    if (v.passages > 2)
      complain("triple point at vertex " + std::to_string(vi) + " (" +
               std::to_string(v.passages) + " passages)");
    for (size_t i = 0; i < v.out_darts.size(); ++i)
      for (size_t j = i + 1; j < v.out_darts.size(); ++j) {
        int a = v.out_darts[i], b = v.out_darts[j];
        if (continuation.count({std::min(a, b), std::max(a, b)})) continue;
        // Crossing angle between the two branch lines.
        Vec3 pa = arr.dart_points(a)[1], pb = arr.dart_points(b)[1];
        Vec3 da = tangent_toward(v.position, pa), db = tangent_toward(v.position, pb);
        double ang = angle_between(da, db);
        double line_angle = std::min(ang, kPi - ang);
        if (line_angle < tol::angle_eps)
          complain("near-tangency at vertex " + std::to_string(vi));
      }
  }
  return report;
}

double winding_area(const Arrangement& arr, const LoopSpec& loop) {
  if (loop.darts.empty()) throw error("empty loop");
  for (size_t k = 0; k < loop.darts.size(); ++k) {
    int d = loop.darts[k], e = loop.darts[(k + 1) % loop.darts.size()];
    if (d < 0 || d >= static_cast<int>(arr.dart_face.size()))
      throw error("loop dart outside the arrangement");
    if (arr.dart_to(d) != arr.dart_from(e)) throw error("loop is not closed");
  }
  std::vector<int> net(arr.arcs.size(), 0);
  for (int d : loop.darts)
    net[Arrangement::dart_arc(d)] += Arrangement::dart_forward(d) ? 1 : -1;

  // Winding numbers by BFS over the face dual with signed crossings.
  std::vector<int> w(arr.faces.size(), 0);
  std::vector<char> known(arr.faces.size(), 0);
  std::vector<int> stack = {0};
  known[0] = 1;
  while (!stack.empty()) {
    int f = stack.back();
    stack.pop_back();
    for (int a = 0; a < static_cast<int>(arr.arcs.size()); ++a) {
      int fl = arr.dart_face[Arrangement::dart(a, true)];
      int fr = arr.dart_face[Arrangement::dart(a, false)];
      int g = -1, wg = 0;
      if (fl == f) {
        g = fr;
        wg = w[f] - net[a];
      } else if (fr == f) {
        g = fl;
        wg = w[f] + net[a];
      } else {
        continue;
      }
      if (known[g]) {
        if (w[g] != wg) throw error("inconsistent winding numbers (open loop?)");
      } else {
        known[g] = 1;
        w[g] = wg;
        stack.push_back(g);
      }
    }
  }
  int lo = *std::min_element(w.begin(), w.end());
  int hi = *std::max_element(w.begin(), w.end());
  double fwd = 0, rev = 0;
  for (size_t f = 0; f < arr.faces.size(); ++f) {
    fwd += (w[f] - lo) * arr.faces[f].area;
    rev += (hi - w[f]) * arr.faces[f].area;
  }
  return std::min(fwd, rev);
}

}  // namespace qslab

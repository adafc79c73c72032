#include "qslab/reeb.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace qslab {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Merge phase bookkeeping for one of the two merge trees.
struct MergeTree {
  std::vector<int> parent;                 // towards the tree root
  std::vector<std::vector<int>> children;  // away from the root

  explicit MergeTree(int n) : parent(n, -1), children(n) {}

  void drop_child(int p, int c) {
    auto& ch = children[p];
    ch.erase(std::find(ch.begin(), ch.end(), c));
  }

  // Remove a vertex with at most one child, reconnecting the child to the
  // grandparent.
  void splice(int v) {
    int p = parent[v];
    if (children[v].empty()) {
      if (p >= 0) drop_child(p, v);
    } else {
      int c = children[v][0];
      parent[c] = p;
      if (p >= 0) {
        drop_child(p, v);
        children[p].push_back(c);
      }
    }
    parent[v] = -1;
    children[v].clear();
  }
};

}  // namespace

std::string MedianLocus::classification_name(Classification c) {
  switch (c) {
    case Classification::Equator: return "equator";
    case Classification::FigureEight: return "figure-eight";
    case Classification::OtherCritical: return "other-critical";
  }
  return "?";
}

ReebGraph build_reeb(const TriMesh& mesh, const ScalarField& field) {
  int nv = mesh.vertex_count();
  if (field.size() != nv) throw error("field does not match mesh");

  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), TieBreakLess{field.values});
  std::vector<int> rank(nv);
  for (int i = 0; i < nv; ++i) rank[order[i]] = i;

  // Join tree (sublevel components, ascending) and split tree (superlevel,
  // descending), both augmented with every vertex.
  MergeTree join(nv), split(nv);
  {
    UnionFind uf(nv);
    std::vector<int> top(nv, -1);
    for (int i = 0; i < nv; ++i) {
      int v = order[i];
      top[uf.find(v)] = v;
      for (int u : mesh.vertex_neighbors[v]) {
        if (rank[u] > rank[v]) continue;
        int r = uf.find(u);
        int w = top[r];
        if (w == v) continue;
        join.parent[w] = v;
        join.children[v].push_back(w);
        uf.unite(r, uf.find(v));
        top[uf.find(v)] = v;
      }
    }
  }
  {
    UnionFind uf(nv);
    std::vector<int> bottom(nv, -1);
    for (int i = nv - 1; i >= 0; --i) {
      int v = order[i];
      bottom[uf.find(v)] = v;
      for (int u : mesh.vertex_neighbors[v]) {
        if (rank[u] < rank[v]) continue;
        int r = uf.find(u);
        int w = bottom[r];
        if (w == v) continue;
        split.parent[w] = v;
        split.children[v].push_back(w);
        uf.unite(r, uf.find(v));
        bottom[uf.find(v)] = v;
      }
    }
  }

  // Carr-Snoeyink-Axen merge into the (augmented) contour tree.
  std::vector<std::vector<int>> ct(nv);
  std::vector<char> removed(nv, 0);
  auto jc = [&](int v) { return static_cast<int>(join.children[v].size()); };
  auto sc = [&](int v) { return static_cast<int>(split.children[v].size()); };
  auto is_lower_leaf = [&](int v) { return jc(v) == 0 && sc(v) <= 1; };
  auto is_upper_leaf = [&](int v) { return sc(v) == 0 && jc(v) <= 1; };

  std::deque<int> queue;
  for (int v = 0; v < nv; ++v)
    if (is_lower_leaf(v) || is_upper_leaf(v)) queue.push_back(v);

  int remaining = nv;
  while (remaining > 1) {
    if (queue.empty())
      throw error("Reeb graph merge stalled: loop detected (non-spherical mesh?)");
    int v = queue.front();
    queue.pop_front();
    if (removed[v]) continue;
    int u = -1, other_parent = -1;
    if (is_lower_leaf(v) && join.parent[v] >= 0) {
      u = join.parent[v];
      other_parent = split.parent[v];
      join.drop_child(u, v);
      join.parent[v] = -1;
      split.splice(v);
    } else if (is_upper_leaf(v) && split.parent[v] >= 0) {
      u = split.parent[v];
      other_parent = join.parent[v];
      split.drop_child(u, v);
      split.parent[v] = -1;
      join.splice(v);
    } else {
      continue;  // not currently removable; will be re-queued when it becomes so
    }
    ct[v].push_back(u);
    ct[u].push_back(v);
    removed[v] = 1;
    --remaining;
    if (is_lower_leaf(u) || is_upper_leaf(u)) queue.push_back(u);
    if (other_parent >= 0 && (is_lower_leaf(other_parent) || is_upper_leaf(other_parent)))
      queue.push_back(other_parent);
  }

  // Reduce: nodes are vertices of contour-tree degree != 2, edges are the
  // degree-2 chains between them.
  ReebGraph reeb;
  reeb.vertex_edge.assign(nv, -1);
  reeb.vertex_node.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (ct[v].size() != 2) {
      reeb.vertex_node[v] = static_cast<int>(reeb.nodes.size());
      reeb.nodes.push_back({v, field[v], {}});
    }
  }
  if (reeb.nodes.empty()) throw error("no critical vertices found");

  auto tie_less = TieBreakLess{field.values};
  std::set<std::pair<int, int>> seen_first_step;
  for (const auto& node : reeb.nodes) {
    int start = node.vertex;
    for (int first : ct[start]) {
      auto step_key = std::minmax(start, first);
      if (seen_first_step.count({step_key.first, step_key.second})) continue;
      std::vector<int> chain;
      int prev = start, cur = first;
      while (ct[cur].size() == 2) {
        chain.push_back(cur);
        int nxt = ct[cur][0] == prev ? ct[cur][1] : ct[cur][0];
        prev = cur;
        cur = nxt;
      }
      // Mark both end steps so the chain is not walked from the far node too.
      seen_first_step.insert({std::min(start, first), std::max(start, first)});
      seen_first_step.insert({std::min(cur, prev), std::max(cur, prev)});

      int eid = static_cast<int>(reeb.edges.size());
      ReebGraph::Edge edge;
      int a = start, b = cur;
      if (tie_less(b, a)) std::swap(a, b);
      edge.node_lo = reeb.vertex_node[a];
      edge.node_hi = reeb.vertex_node[b];
      edge.v_lo = field[a];
      edge.v_hi = field[b];
      reeb.edges.push_back(std::move(edge));
      reeb.nodes[reeb.vertex_node[a]].edges.push_back(eid);
      reeb.nodes[reeb.vertex_node[b]].edges.push_back(eid);
      for (int w : chain) reeb.vertex_edge[w] = eid;
    }
  }
  if (reeb.nodes.size() != reeb.edges.size() + 1)
    throw error("Reeb graph is not a tree");

  // Pushforward measure: each face contributes its area as an atom on the
  // edge owning the face's (tie-broken) middle vertex.
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& t = mesh.faces[f];
    std::array<int, 3> vs = {t[0], t[1], t[2]};
    std::sort(vs.begin(), vs.end(), tie_less);
    int mid = vs[1];
    int eid = reeb.vertex_edge[mid];
    if (eid < 0) eid = reeb.nodes[reeb.vertex_node[mid]].edges.front();
    auto& edge = reeb.edges[eid];
    double value = std::clamp(field[mid], edge.v_lo, edge.v_hi);
    edge.atoms.push_back({value, mesh.face_area[f]});
  }
  reeb.total_measure = 0;
  for (auto& edge : reeb.edges) {
    std::stable_sort(edge.atoms.begin(), edge.atoms.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    edge.cum.resize(edge.atoms.size());
    double run = 0;
    for (size_t i = 0; i < edge.atoms.size(); ++i) {
      run += edge.atoms[i].second;
      edge.cum[i] = run;
    }
    edge.measure = run;
    reeb.total_measure += run;
  }
  return reeb;
}

MedianLocus median_point(const ReebGraph& reeb) {
  int nn = static_cast<int>(reeb.nodes.size());
  if (nn == 1) {
    // Degenerate single-node graph.
    MedianLocus locus;
    locus.at_node = true;
    locus.node = 0;
    locus.node_vertex = reeb.nodes[0].vertex;
    locus.value = reeb.nodes[0].value;
    locus.max_complement_mass = 0;
    locus.classification = MedianLocus::Classification::OtherCritical;
    return locus;
  }

  // Root the tree and accumulate subtree masses.
  std::vector<int> parent_edge(nn, -1), parent(nn, -1), bfs;
  bfs.push_back(0);
  std::vector<char> seen(nn, 0);
  seen[0] = 1;
  for (size_t i = 0; i < bfs.size(); ++i) {
    int n = bfs[i];
    for (int e : reeb.nodes[n].edges) {
      int m = reeb.edges[e].node_lo == n ? reeb.edges[e].node_hi : reeb.edges[e].node_lo;
      if (seen[m]) continue;
      seen[m] = 1;
      parent[m] = n;
      parent_edge[m] = e;
      bfs.push_back(m);
    }
  }
  std::vector<double> subtree(nn, 0);
  for (size_t i = bfs.size(); i-- > 1;) {
    int n = bfs[i];
    subtree[parent[n]] += subtree[n] + reeb.edges[parent_edge[n]].measure;
  }
  double total = reeb.total_measure;
  auto outmass = [&](int from, int e) {
    int to = reeb.edges[e].node_lo == from ? reeb.edges[e].node_hi : reeb.edges[e].node_lo;
    if (parent[to] == from && parent_edge[to] == e)
      return reeb.edges[e].measure + subtree[to];
    return total - subtree[from];
  };

  const double half = total / 2.0;
  int cur = 0;
  for (int guard = 0; guard <= nn; ++guard) {
    double max_away = 0;
    int max_edge = -1;
    for (int e : reeb.nodes[cur].edges) {
      double m = outmass(cur, e);
      if (m > max_away) {
        max_away = m;
        max_edge = e;
      }
    }
    if (max_away <= half + tol::balance_eta || max_edge < 0) {
      MedianLocus locus;
      locus.at_node = true;
      locus.node = cur;
      locus.node_vertex = reeb.nodes[cur].vertex;
      locus.value = reeb.nodes[cur].value;
      locus.max_complement_mass = max_away;
      locus.classification = reeb.nodes[cur].degree() == 3
                                 ? MedianLocus::Classification::FigureEight
                                 : MedianLocus::Classification::OtherCritical;
      return locus;
    }
    const auto& edge = reeb.edges[max_edge];
    double target = max_away - half;
    if (target >= edge.measure - 1e-15) {
      cur = edge.node_lo == cur ? edge.node_hi : edge.node_lo;
      continue;
    }
    // Interior point: leave `target` mass behind on the current side.
    bool from_low = edge.node_lo == cur;
    size_t k;
    double behind;
    if (from_low) {
      k = 0;
      while (k < edge.cum.size() && edge.cum[k] < target - 1e-15) ++k;
      behind = k < edge.cum.size() ? edge.cum[k] : edge.measure;
    } else {
      // Walk atoms from the high end.
      size_t j = edge.atoms.size();
      double run = 0;
      while (j > 0 && run < target - 1e-15) run += edge.atoms[--j].second;
      k = j;
      behind = run;
    }
    MedianLocus locus;
    locus.at_node = false;
    locus.edge = max_edge;
    locus.value = edge.atoms.empty()
                      ? (edge.v_lo + edge.v_hi) / 2
                      : edge.atoms[std::min(k, edge.atoms.size() - 1)].first;
    double far = max_away - behind;
    locus.max_complement_mass = std::max(far, total - far);
    locus.classification = MedianLocus::Classification::Equator;
    return locus;
  }
  throw error("median walk failed to terminate");
}

double zeta(const TriMesh& mesh, const ScalarField& field) {
  return median_point(build_reeb(mesh, field)).value;
}

double zeta_oracle(const TriMesh& mesh, const ScalarField& field) {
  int nv = mesh.vertex_count();
  // Balance function: largest sublevel component mass minus largest
  // superlevel component mass; nondecreasing in the level.
  auto balance = [&](double t) {
    UnionFind below(nv), above(nv);
    for (int v = 0; v < nv; ++v)
      for (int u : mesh.vertex_neighbors[v]) {
        if (u < v) continue;
        if (field[v] < t && field[u] < t) below.unite(u, v);
        if (field[v] >= t && field[u] >= t) above.unite(u, v);
      }
    std::vector<double> below_mass(nv, 0), above_mass(nv, 0);
    for (int f = 0; f < mesh.face_count(); ++f)
      for (int corner : mesh.faces[f]) {
        if (field[corner] < t)
          below_mass[below.find(corner)] += mesh.face_area[f] / 3.0;
        else
          above_mass[above.find(corner)] += mesh.face_area[f] / 3.0;
      }
    double max_b = 0, max_a = 0;
    for (int v = 0; v < nv; ++v) {
      max_b = std::max(max_b, below_mass[v]);
      max_a = std::max(max_a, above_mass[v]);
    }
    return max_b - max_a;
  };

  double lo = *std::min_element(field.values.begin(), field.values.end());
  double hi = *std::max_element(field.values.begin(), field.values.end());
  if (lo == hi) return lo;  // constant field: the whole sphere is one component
  for (int it = 0; it < 60; ++it) {
    double mid = (lo + hi) / 2;
    if (balance(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

namespace {

// Shared marching machinery for level-curve extraction.
struct LevelTracer {
  const TriMesh& mesh;
  const ScalarField& field;
  std::vector<char> below;  // per vertex
  double level;             // interpolation level

  Vec3 crossing(int u, int v) const {
    double fu = field[u], fv = field[v];
    double denom = fv - fu;
    double a = denom != 0 ? (level - fu) / denom : 0.5;
    a = std::clamp(a, 1e-9, 1.0 - 1e-9);
    return (mesh.vertices[u] * (1.0 - a) + mesh.vertices[v] * a).normalized();
  }

  // Straddling edges of a face, as corner indices (edge i is opposite
  // corner i).
  std::vector<int> straddling(int f) const {
    std::vector<int> out;
    const auto& t = mesh.faces[f];
    for (int i = 0; i < 3; ++i) {
      int u = t[(i + 1) % 3], v = t[(i + 2) % 3];
      if (below[u] != below[v]) out.push_back(i);
    }
    return out;
  }
};

}  // namespace

CurveOnSphere median_curve(const TriMesh& mesh, const ScalarField& field,
                           const MedianLocus& locus) {
  LevelTracer tracer{mesh, field, std::vector<char>(mesh.vertex_count(), 0), 0};

  if (!locus.at_node) {
    // Generic extraction level strictly between the median atom value and
    // the next larger vertex value.
    std::vector<double> vals = field.values;
    std::sort(vals.begin(), vals.end());
    auto it = std::upper_bound(vals.begin(), vals.end(), locus.value);
    if (it == vals.end()) throw error("median level at the top of the range");
    double te = (locus.value + *it) / 2;
    if (te == locus.value) te = *it;  // denormal-close values
    tracer.level = te;
    for (int v = 0; v < mesh.vertex_count(); ++v) tracer.below[v] = field[v] < te;

    // Trace every loop at this level.
    struct Loop {
      std::vector<Vec3> points;
      int sample_below = -1, sample_above = -1;  // vertices on each side
    };
    std::vector<Loop> loops;
    std::vector<char> face_done(mesh.face_count(), 0);
    for (int f0 = 0; f0 < mesh.face_count(); ++f0) {
      if (face_done[f0]) continue;
      auto edges = tracer.straddling(f0);
      if (edges.empty()) continue;
      Loop loop;
      int f = f0, exit_corner = edges[0];
      do {
        face_done[f] = 1;
        const auto& t = mesh.faces[f];
        int u = t[(exit_corner + 1) % 3], v = t[(exit_corner + 2) % 3];
        if (loop.sample_below < 0) {
          loop.sample_below = tracer.below[u] ? u : v;
          loop.sample_above = tracer.below[u] ? v : u;
        }
        Vec3 p = tracer.crossing(std::min(u, v), std::max(u, v));
        if (loop.points.empty() || (p - loop.points.back()).norm() > tol::point_eps)
          loop.points.push_back(p);
        int g = mesh.face_neighbors[f][exit_corner];
        // Entering edge in g is the shared edge; leave via the other
        // straddling edge.
        auto ge = tracer.straddling(g);
        int enter = -1;
        for (int c : ge) {
          const auto& gt = mesh.faces[g];
          int gu = gt[(c + 1) % 3], gv = gt[(c + 2) % 3];
          if (std::min(gu, gv) == std::min(u, v) && std::max(gu, gv) == std::max(u, v))
            enter = c;
        }
        if (enter < 0 || ge.size() != 2) throw error("level tracing lost the contour");
        f = g;
        exit_corner = ge[0] == enter ? ge[1] : ge[0];
      } while (f != f0);
      while (loop.points.size() > 1 &&
             (loop.points.back() - loop.points.front()).norm() <= tol::point_eps)
        loop.points.pop_back();
      if (loop.points.size() < 3) throw error("degenerate level loop");
      loops.push_back(std::move(loop));
    }
    if (loops.empty()) throw error("no level curve at the median level");

    // Side masses per loop via the component tree of the level complement.
    UnionFind comp(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
      for (int u : mesh.vertex_neighbors[v])
        if (u > v && tracer.below[u] == tracer.below[v]) comp.unite(u, v);
    std::vector<double> comp_mass(mesh.vertex_count(), 0);
    for (int f = 0; f < mesh.face_count(); ++f)
      for (int corner : mesh.faces[f])
        comp_mass[comp.find(corner)] += mesh.face_area[f] / 3.0;

    // Components and loops form a tree; removing one loop splits the mass.
    std::map<int, std::vector<size_t>> comp_loops;
    for (size_t i = 0; i < loops.size(); ++i) {
      comp_loops[comp.find(loops[i].sample_below)].push_back(i);
      comp_loops[comp.find(loops[i].sample_above)].push_back(i);
    }
    size_t best = 0;
    double best_max = 2.0;
    for (size_t i = 0; i < loops.size(); ++i) {
      // BFS over components avoiding loop i, starting on its below side.
      std::set<int> visited;
      std::vector<int> stack = {comp.find(loops[i].sample_below)};
      std::set<size_t> used = {i};
      double side = 0;
      while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        if (!visited.insert(c).second) continue;
        side += comp_mass[c];
        for (size_t j : comp_loops[c]) {
          if (!used.insert(j).second) continue;
          int cb = comp.find(loops[j].sample_below);
          int ca = comp.find(loops[j].sample_above);
          stack.push_back(cb == c ? ca : cb);
        }
      }
      double m = std::max(side, 1.0 - side);
      if (m < best_max) {
        best_max = m;
        best = i;
      }
    }
    CurveOnSphere curve;
    curve.points = std::move(loops[best].points);
    validate_curve(curve);
    return curve;
  }

  // Node locus: trace the level set through the critical vertex itself.
  int s = locus.node_vertex;
  if (s < 0) throw error("node locus without vertex");
  tracer.level = locus.value;
  TieBreakLess less{field.values};
  for (int v = 0; v < mesh.vertex_count(); ++v)
    tracer.below[v] = less(v, s);
  tracer.below[s] = 0;  // the saddle itself sits on the level

  // Branch faces: incident to s with a straddling opposite edge.
  std::vector<int> branch_faces;
  for (int f : mesh.vertex_faces[s]) {
    const auto& t = mesh.faces[f];
    int ci = t[0] == s ? 0 : (t[1] == s ? 1 : 2);
    int u = t[(ci + 1) % 3], v = t[(ci + 2) % 3];
    if (tracer.below[u] != tracer.below[v]) branch_faces.push_back(f);
  }
  if (branch_faces.empty())
    throw error("median at a point-like critical component: no curve");

  const Vec3& sp = mesh.vertices[s];
  std::vector<char> used(branch_faces.size(), 0);
  CurveOnSphere curve;
  std::vector<int> s_indices;
  for (size_t bi = 0; bi < branch_faces.size(); ++bi) {
    if (used[bi]) continue;
    used[bi] = 1;
    s_indices.push_back(curve.size());
    curve.points.push_back(sp);
    int f = branch_faces[bi];
    // Exit through the opposite edge.
    while (true) {
      const auto& t = mesh.faces[f];
      bool incident = t[0] == s || t[1] == s || t[2] == s;
      int exit_corner;
      if (incident) {
        exit_corner = t[0] == s ? 0 : (t[1] == s ? 1 : 2);
      } else {
        exit_corner = -1;
      }
      if (incident && f != branch_faces[bi]) {
        // Excursion returns to the saddle star; close it.
        auto it = std::find(branch_faces.begin(), branch_faces.end(), f);
        if (it == branch_faces.end()) throw error("saddle tracing re-entered a non-branch face");
        used[it - branch_faces.begin()] = 1;
        break;
      }
      int u, v, next_f;
      if (incident) {
        u = t[(exit_corner + 1) % 3];
        v = t[(exit_corner + 2) % 3];
        next_f = mesh.face_neighbors[f][exit_corner];
      } else {
        throw error("saddle tracing left the excursion loop");
      }
      curve.points.push_back(tracer.crossing(std::min(u, v), std::max(u, v)));
      // March through regular faces until we re-enter the star of s.
      int prev_u = std::min(u, v), prev_v = std::max(u, v);
      f = next_f;
      while (!(mesh.faces[f][0] == s || mesh.faces[f][1] == s || mesh.faces[f][2] == s)) {
        auto fe = tracer.straddling(f);
        if (fe.size() != 2) throw error("level tracing lost the contour at the saddle");
        const auto& ft = mesh.faces[f];
        int pick = -1;
        for (int c : fe) {
          int a = ft[(c + 1) % 3], b = ft[(c + 2) % 3];
          if (!(std::min(a, b) == prev_u && std::max(a, b) == prev_v)) pick = c;
        }
        int a = ft[(pick + 1) % 3], b = ft[(pick + 2) % 3];
        curve.points.push_back(tracer.crossing(std::min(a, b), std::max(a, b)));
        prev_u = std::min(a, b);
        prev_v = std::max(a, b);
        f = mesh.face_neighbors[f][pick];
      }
    }
  }
  for (size_t i = 0; i < s_indices.size(); ++i)
    for (size_t j = i + 1; j < s_indices.size(); ++j)
      curve.self_intersections.push_back({s_indices[i], s_indices[j]});
  validate_curve(curve);
  return curve;
}

}  // namespace qslab

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qslab/curve.hpp"
#include "qslab/field.hpp"
#include "qslab/mesh.hpp"

namespace qslab {

/// Measured Reeb graph of a PL field on the sphere.  Always a tree
/// (V - E = 1); edge measures carry the pushforward of the face areas and
/// sum to 1.
struct ReebGraph {
  struct Node {
    int vertex;       // mesh vertex realizing the critical component
    double value;     // raw field value (tie-break perturbation stripped)
    std::vector<int> edges;
    int degree() const { return static_cast<int>(edges.size()); }
  };
  struct Edge {
    int node_lo, node_hi;  // endpoints, lo below hi in tie-broken order
    double v_lo, v_hi;     // raw value range
    double measure = 0;
    // Monotone measure profile: atoms (value, mass) sorted by value with
    // prefix sums from the low end; mu(t) = mass of the edge part below t.
    std::vector<std::pair<double, double>> atoms;
    std::vector<double> cum;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  double total_measure = 0;

  // Mapping from mesh vertices into the graph (one of the two is >= 0).
  std::vector<int> vertex_edge;
  std::vector<int> vertex_node;
};

struct MedianLocus {
  enum class Classification { Equator, FigureEight, OtherCritical };

  bool at_node = false;
  int edge = -1;         // valid when interior point
  int node = -1;         // valid when at a node
  int node_vertex = -1;  // mesh vertex of that node
  double value = 0;  // raw field value at the locus
  double max_complement_mass = 0;
  Classification classification = Classification::Equator;

  static std::string classification_name(Classification c);
};

/// Union-find sweep over the tie-broken vertex order; join and split trees
/// merged into the contour tree, which is the Reeb graph on genus 0.
ReebGraph build_reeb(const TriMesh& mesh, const ScalarField& field);

/// The point minimizing the largest complementary component mass.
MedianLocus median_point(const ReebGraph& reeb);

/// Median quasi-state value: the field value over the tree median.
double zeta(const TriMesh& mesh, const ScalarField& field);

/// Independent oracle: bisection over the level t balancing the largest
/// sublevel and superlevel component masses.  Shares no code with
/// build_reeb.
double zeta_oracle(const TriMesh& mesh, const ScalarField& field);

/// Level-set component over the median, traced as a closed geodesic
/// polyline crossing mesh edges.  Figure-eight loci produce a single
/// closed curve with one transverse self-intersection at the saddle.
CurveOnSphere median_curve(const TriMesh& mesh, const ScalarField& field,
                           const MedianLocus& locus);

}  // namespace qslab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qslab/mesh.hpp"

namespace qslab {

/// One real value per mesh vertex, interpreted piecewise-linearly.
struct ScalarField {
  std::vector<double> values;

  double operator[](int v) const { return values[v]; }
  int size() const { return static_cast<int>(values.size()); }
};

/// How to produce a field on a given mesh.  Random band-limited fields are
/// bit-reproducible functions of (seed, max_degree, mesh).
struct FieldSpec {
  enum class Kind {
    BuiltinHeight,
    BuiltinCartesianX,
    BuiltinCartesianY,
    BuiltinCartesianZ,
    SphericalHarmonics,
    RandomBandLimited,
    VertexArray,
  };
  Kind kind = Kind::BuiltinHeight;

  // SphericalHarmonics: coefficients in (l, m) order l = 0..L, m = -l..l.
  std::vector<double> coefficients;

  // RandomBandLimited:
  std::uint64_t seed = 0;
  int max_degree = 4;

  // VertexArray:
  std::vector<double> values;

  static FieldSpec height() { return {}; }
  static FieldSpec cartesian(char axis);
  static FieldSpec harmonics(std::vector<double> coeffs);
  static FieldSpec random_band_limited(std::uint64_t seed, int max_degree);
  static FieldSpec vertex_array(std::vector<double> values);

  static Kind kind_from_string(const std::string& s);
  static std::string kind_to_string(Kind k);
};

ScalarField sample_field(const TriMesh& mesh, const FieldSpec& spec);

/// Real spherical harmonic basis value, normalized so that the (l=0, m=0)
/// basis function is identically 1.
double real_spherical_harmonic(int l, int m, const Vec3& p);

/// Lexicographic (value, vertex index) comparison used to simulate
/// genericity without changing values.
struct TieBreakLess {
  const std::vector<double>& values;
  bool operator()(int a, int b) const {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  }
};

/// Vertex-wise operations.
ScalarField add(const ScalarField& a, const ScalarField& b);
ScalarField scale(const ScalarField& a, double s);
ScalarField shift(const ScalarField& a, double c);

/// Upper bound on the Lipschitz constant of the PL field (max face gradient norm).
double lipschitz_bound(const TriMesh& mesh, const ScalarField& f);

}  // namespace qslab

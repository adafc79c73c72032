#include "qslab/field.hpp"

#include <cmath>
#include <random>

namespace qslab {

FieldSpec FieldSpec::cartesian(char axis) {
  FieldSpec s;
  switch (axis) {
    case 'x': s.kind = Kind::BuiltinCartesianX; break;
    case 'y': s.kind = Kind::BuiltinCartesianY; break;
    case 'z': s.kind = Kind::BuiltinCartesianZ; break;
    default: throw error("cartesian axis must be x, y or z");
  }
  return s;
}

FieldSpec FieldSpec::harmonics(std::vector<double> coeffs) {
  FieldSpec s;
  s.kind = Kind::SphericalHarmonics;
  s.coefficients = std::move(coeffs);
  return s;
}

FieldSpec FieldSpec::random_band_limited(std::uint64_t seed, int max_degree) {
  FieldSpec s;
  s.kind = Kind::RandomBandLimited;
  s.seed = seed;
  s.max_degree = max_degree;
  return s;
}

FieldSpec FieldSpec::vertex_array(std::vector<double> values) {
  FieldSpec s;
  s.kind = Kind::VertexArray;
  s.values = std::move(values);
  return s;
}

FieldSpec::Kind FieldSpec::kind_from_string(const std::string& s) {
  if (s == "builtin-height") return Kind::BuiltinHeight;
  if (s == "builtin-cartesian-x") return Kind::BuiltinCartesianX;
  if (s == "builtin-cartesian-y") return Kind::BuiltinCartesianY;
  if (s == "builtin-cartesian-z") return Kind::BuiltinCartesianZ;
  if (s == "spherical-harmonic-coefficients") return Kind::SphericalHarmonics;
  if (s == "random-band-limited") return Kind::RandomBandLimited;
  if (s == "vertex-array") return Kind::VertexArray;
  throw error("unknown field kind: " + s);
}

std::string FieldSpec::kind_to_string(Kind k) {
  switch (k) {
    case Kind::BuiltinHeight: return "builtin-height";
    case Kind::BuiltinCartesianX: return "builtin-cartesian-x";
    case Kind::BuiltinCartesianY: return "builtin-cartesian-y";
    case Kind::BuiltinCartesianZ: return "builtin-cartesian-z";
    case Kind::SphericalHarmonics: return "spherical-harmonic-coefficients";
    case Kind::RandomBandLimited: return "random-band-limited";
    case Kind::VertexArray: return "vertex-array";
  }
  throw error("bad field kind");
}

namespace {

// Associated Legendre P_l^m(x) for m >= 0, without Condon-Shortley phase.
double legendre_plm(int l, int m, double x) {
  double pmm = 1.0;
  if (m > 0) {
    double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= fact * somx2;
      fact += 2.0;
    }
  }
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = ((2.0 * ll - 1.0) * x * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

double factorial_ratio(int l, int m) {
  // (l-m)! / (l+m)!
  double r = 1.0;
  for (int k = l - m + 1; k <= l + m; ++k) r /= k;
  return r;
}

}  // namespace

double real_spherical_harmonic(int l, int m, const Vec3& p) {
  // Orthonormal real harmonics divided by Y_00 = sqrt(1/4pi), so the l=0
  // basis function is the constant 1.
  double ct = p.z;
  double phi = std::atan2(p.y, p.x);
  int am = std::abs(m);
  double norm = std::sqrt((2.0 * l + 1.0) * factorial_ratio(l, am));
  double plm = legendre_plm(l, am, ct);
  if (m == 0) return norm * plm;
  double sq2 = std::sqrt(2.0);
  if (m > 0) return sq2 * norm * plm * std::cos(am * phi);
  return sq2 * norm * plm * std::sin(am * phi);
}

ScalarField sample_field(const TriMesh& mesh, const FieldSpec& spec) {
  int nv = mesh.vertex_count();
  ScalarField f;
  f.values.resize(nv);
  using K = FieldSpec::Kind;
  switch (spec.kind) {
    case K::BuiltinHeight:
    case K::BuiltinCartesianZ:
      for (int v = 0; v < nv; ++v) f.values[v] = mesh.vertices[v].z;
      break;
    case K::BuiltinCartesianX:
      for (int v = 0; v < nv; ++v) f.values[v] = mesh.vertices[v].x;
      break;
    case K::BuiltinCartesianY:
      for (int v = 0; v < nv; ++v) f.values[v] = mesh.vertices[v].y;
      break;
    case K::SphericalHarmonics: {
      // coefficients laid out (l, m): l = 0..L with 2l+1 entries each.
      int n = static_cast<int>(spec.coefficients.size());
      int L = 0;
      while ((L + 1) * (L + 1) < n) ++L;
      if ((L + 1) * (L + 1) != n)
        throw error("spherical harmonic coefficient count must be (L+1)^2");
      for (const double c : spec.coefficients)
        if (!std::isfinite(c)) throw error("non-finite harmonic coefficient");
      for (int v = 0; v < nv; ++v) {
        double sum = 0;
        int idx = 0;
        for (int l = 0; l <= L; ++l)
          for (int m = -l; m <= l; ++m, ++idx)
            if (spec.coefficients[idx] != 0)
              sum += spec.coefficients[idx] * real_spherical_harmonic(l, m, mesh.vertices[v]);
        f.values[v] = sum;
      }
      break;
    }
    case K::RandomBandLimited: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      int L = spec.max_degree;
      if (L < 0) throw error("max_degree must be nonnegative");
      std::vector<double> coeffs((L + 1) * (L + 1));
      int idx = 0;
      for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m, ++idx)
          coeffs[idx] = gauss(rng) / (1.0 + l);
      coeffs[0] = 0;  // keep random fields centered
      FieldSpec sh = FieldSpec::harmonics(std::move(coeffs));
      return sample_field(mesh, sh);
    }
    case K::VertexArray:
      if (static_cast<int>(spec.values.size()) != nv)
        throw error("vertex-array length does not match mesh");
      f.values = spec.values;
      break;
  }
  for (double v : f.values)
    if (!std::isfinite(v)) throw error("field has non-finite values");
  return f;
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
  if (a.size() != b.size()) throw error("field size mismatch");
  ScalarField r = a;
  for (int i = 0; i < b.size(); ++i) r.values[i] += b.values[i];
  return r;
}

ScalarField scale(const ScalarField& a, double s) {
  ScalarField r = a;
  for (double& v : r.values) v *= s;
  return r;
}

ScalarField shift(const ScalarField& a, double c) {
  ScalarField r = a;
  for (double& v : r.values) v += c;
  return r;
}

double lipschitz_bound(const TriMesh& mesh, const ScalarField& f) {
  double lip = 0;
  for (int face = 0; face < mesh.face_count(); ++face)
    lip = std::max(lip, face_gradient(mesh, f.values, face).norm());
  return lip;
}

}  // namespace qslab

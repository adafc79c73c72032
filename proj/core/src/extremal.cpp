#include "qslab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qslab/geometry.hpp"

namespace qslab {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

// Exact area of the sector spanned by one PL profile segment restricted to
// the sub-interval [0, t] of its parameter: integral of rho(s)^2 / 2 over
// the angular sub-span.
double segment_area(double rho0, double rho1, double dtheta, double t) {
  const double d = rho1 - rho0;
  // integral_0^t (rho0 + d s)^2 ds = rho0^2 t + rho0 d t^2 + d^2 t^3 / 3
  const double integral = t * (rho0 * rho0 + rho0 * d * t + d * d * t * t / 3.0);
  return 0.5 * dtheta * integral;
}

double region_area(const PlanarRegion& region) {
  const int n = static_cast<int>(region.rho.size());
  const double dtheta = kTwoPi / n;
  double area = 0;
  for (int k = 0; k < n; ++k) {
    area += segment_area(region.rho[k], region.rho[(k + 1) % n], dtheta, 1.0);
  }
  return area;
}

}  // namespace

double PlanarRegion::rho_at(double theta) const {
  const int n = static_cast<int>(rho.size());
  const double u = wrap_angle(theta) * n / kTwoPi;
  const int k = std::min(static_cast<int>(u), n - 1);
  const double t = u - k;
  return rho[k] + (rho[(k + 1) % n] - rho[k]) * t;
}

double PlanarRegion::sector_cumulative(double theta) const {
  const int n = static_cast<int>(rho.size());
  const double dtheta = kTwoPi / n;
  const double u = wrap_angle(theta) * n / kTwoPi;
  const int k = std::min(static_cast<int>(u), n - 1);
  double acc = 0;
  for (int j = 0; j < k; ++j) {
    acc += segment_area(rho[j], rho[(j + 1) % n], dtheta, 1.0);
  }
  acc += segment_area(rho[k], rho[(k + 1) % n], dtheta, u - k);
  return acc;
}

PlanarRegion box_region(double x0, double x1, double y0, double y1, int samples) {
  if (!(x1 > x0) || !(y1 > y0)) throw error("box_region: empty box");
  if (samples < 16) throw error("box_region: too few profile samples");
  PlanarRegion region;
  region.center = {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
  const double hx = 0.5 * (x1 - x0), hy = 0.5 * (y1 - y0);
  region.rho.resize(samples);
  for (int k = 0; k < samples; ++k) {
    const double theta = kTwoPi * k / samples;
    const double c = std::abs(std::cos(theta)), s = std::abs(std::sin(theta));
    const double rx = c > 1e-300 ? hx / c : 1e300;
    const double ry = s > 1e-300 ? hy / s : 1e300;
    region.rho[k] = std::min(rx, ry);
  }
  region.area = region_area(region);
  return region;
}

PlanarRegion disc_region(double radius, int samples) {
  if (!(radius > 0)) throw error("disc_region: radius must be positive");
  if (samples < 16) throw error("disc_region: too few profile samples");
  PlanarRegion region;
  region.rho.assign(samples, radius);
  region.area = region_area(region);
  return region;
}

namespace {

// ---------------------------------------------------------------------------
// The near-extremal region.
//
// The three balance lines x = 0, y = 0 and x + y = 1/2 bound the central
// triangle; the region is star-shaped about a point inside it.  The radial
// profile is a base circle plus three raised-cosine lobes reaching into the
// outer cells {x < 0, y > 0, above the line}, {x > 0, y < 0, above the line}
// and {x < 0, y < 0}.  Lobe directions are mirror-symmetric across the
// diagonal x = y, which makes the x and y masses equal by construction.
// Base radius and the two lobe amplitudes are tuned so the total area is 1/2
// and the x and x + y masses are each 1/4.

struct StarShape {
  std::array<double, 2> center{0.18, 0.18};
  double theta2 = 120.0 * kPi / 180.0;  // lobe into {x < 0, y > 0, above}
  double theta3 = -30.0 * kPi / 180.0;  // diagonal mirror of theta2
  double theta4 = 225.0 * kPi / 180.0;  // lobe into {x < 0, y < 0}
  double width2 = 0.7;
  double width4 = 1.3;
  double rho0 = 0.13;
  double amp2 = 0.95;
  double amp4 = 0.67;

  static double lobe(double theta, double center_angle, double width) {
    double d = wrap_angle(theta - center_angle);
    if (d > kPi) d -= kTwoPi;
    if (std::abs(d) >= 0.5 * width) return 0.0;
    return 0.5 * (1.0 + std::cos(kTwoPi * d / width));
  }

  double profile(double theta) const {
    return rho0 + amp2 * lobe(theta, theta2, width2) +
           amp2 * lobe(theta, theta3, width2) + amp4 * lobe(theta, theta4, width4);
  }
};

struct StarMasses {
  double total = 0;
  double x_neg = 0;
  double y_neg = 0;
  double line_below = 0;  // mass of {x + y < 1/2}
};

// Ray contribution to the half-plane {a . p < b}: the part of [0, rho] along
// direction e from center c with a . (c + r e) < b, weighted by r dr.
double ray_halfplane(double rho, double a_dot_c, double a_dot_e, double b) {
  if (std::abs(a_dot_e) < 1e-15) {
    return a_dot_c < b ? 0.5 * rho * rho : 0.0;
  }
  const double r_cross = std::clamp((b - a_dot_c) / a_dot_e, 0.0, rho);
  if (a_dot_e > 0) return 0.5 * r_cross * r_cross;  // inside for r < r_cross
  return 0.5 * (rho * rho - r_cross * r_cross);     // inside for r > r_cross
}

StarMasses star_masses(const StarShape& shape, int panels = 16384) {
  StarMasses m;
  const double cx = shape.center[0], cy = shape.center[1];
  // Simpson over theta; the integrands are continuous and piecewise smooth.
  const double h = kTwoPi / panels;
  for (int k = 0; k <= panels; ++k) {
    const double theta = h * k;
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double rho = shape.profile(theta);
    const double c = std::cos(theta), s = std::sin(theta);
    m.total += w * 0.5 * rho * rho;
    m.x_neg += w * ray_halfplane(rho, cx, c, 0.0);
    m.y_neg += w * ray_halfplane(rho, cy, s, 0.0);
    m.line_below += w * ray_halfplane(rho, cx + cy, c + s, 0.5);
  }
  const double scale = h / 3.0;
  m.total *= scale;
  m.x_neg *= scale;
  m.y_neg *= scale;
  m.line_below *= scale;
  return m;
}

void solve_3x3(double a[3][3], double b[3], double x[3]) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[perm[r]][col]) > std::abs(a[perm[piv]][col])) piv = r;
    }
    std::swap(perm[col], perm[piv]);
    const double d = a[perm[col]][col];
    if (std::abs(d) < 1e-14) throw error("build_sigma: singular tuning system");
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[perm[r]][col] / d;
      for (int c = col; c < 3; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  for (int row = 2; row >= 0; --row) {
    double acc = b[perm[row]];
    for (int c = row + 1; c < 3; ++c) acc -= a[perm[row]][c] * x[c];
    x[row] = acc / a[perm[row]][row];
  }
}

}  // namespace

PlanarRegion build_sigma(const SigmaParams& params) {
  if (!(params.connector_width > 0) || params.connector_width > 0.35) {
    throw error(
        "build_sigma: sigma connectors degenerate: region would disconnect");
  }
  if (!(params.smoothing > 0.15) || !(params.smoothing < 1.3)) {
    throw error("build_sigma: smoothing out of range");
  }

  StarShape shape;
  shape.width2 = params.smoothing;
  shape.width4 = 1.857 * params.smoothing;

  // Damped Newton on (rho0, amp2, amp4) against
  // (total - 1/2, mass{x<0} - 1/4, mass{x+y<1/2} - 1/4).
  auto residual = [](const StarShape& s, double out[3]) {
    const StarMasses m = star_masses(s);
    out[0] = m.total - 0.5;
    out[1] = m.x_neg - 0.25;
    out[2] = m.line_below - 0.25;
  };

  double f[3];
  residual(shape, f);
  for (int iter = 0; iter < 60; ++iter) {
    const double norm = std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
    if (norm < 1e-12) break;
    double jac[3][3];
    const double dk = 1e-6;
    for (int j = 0; j < 3; ++j) {
      StarShape probe = shape;
      double* param = j == 0 ? &probe.rho0 : (j == 1 ? &probe.amp2 : &probe.amp4);
      *param += dk;
      double fp[3];
      residual(probe, fp);
      for (int i = 0; i < 3; ++i) jac[i][j] = (fp[i] - f[i]) / dk;
    }
    double rhs[3] = {-f[0], -f[1], -f[2]};
    double step[3];
    solve_3x3(jac, rhs, step);
    double damping = 1.0;
    bool improved = false;
    for (int tries = 0; tries < 10; ++tries) {
      StarShape trial = shape;
      trial.rho0 = std::clamp(shape.rho0 + damping * step[0], 0.05, 0.6);
      trial.amp2 = std::clamp(shape.amp2 + damping * step[1], 0.0, 1.2);
      trial.amp4 = std::clamp(shape.amp4 + damping * step[2], 0.0, 1.2);
      double ft[3];
      residual(trial, ft);
      const double trial_norm =
          std::max({std::abs(ft[0]), std::abs(ft[1]), std::abs(ft[2])});
      if (trial_norm < norm) {
        shape = trial;
        f[0] = ft[0];
        f[1] = ft[1];
        f[2] = ft[2];
        improved = true;
        break;
      }
      damping *= 0.5;
    }
    if (!improved) break;
  }
  if (std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])}) > 1e-9) {
    throw error("build_sigma: tuning did not converge");
  }

  PlanarRegion region;
  region.center = shape.center;
  const int n = 4096;
  region.rho.resize(n);
  for (int k = 0; k < n; ++k) {
    region.rho[k] = shape.profile(kTwoPi * k / n);
  }
  region.area = region_area(region);

#ifdef QSLAB_SIGMA_DEBUG
  std::fprintf(stderr, "sigma debug: rho0=%.5f amp2=%.5f amp4=%.5f\n",
               shape.rho0, shape.amp2, shape.amp4);
#endif
  // Constraint check on the tuned shape.
  const double min_rho = *std::min_element(region.rho.begin(), region.rho.end());
  if (min_rho < params.connector_width) {
    throw error(
        "build_sigma: sigma connectors degenerate: region would disconnect");
  }
  const StarMasses m = star_masses(shape);
  const double fx = m.x_neg / m.total;
  const double fy = m.y_neg / m.total;
  const double fl = m.line_below / m.total;
  if (std::abs(m.total - 0.5) > 1e-6 || fx < 0.49 || fx > 0.51 || fy < 0.49 ||
      fy > 0.51 || fl < 0.49 || fl > 0.51) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "build_sigma: constraint check failed: total=%.8f x=%.5f "
                  "y=%.5f line=%.5f",
                  m.total, fx, fy, fl);
    throw error(buf);
  }
  return region;
}

TransportMap knothe_map(const PlanarRegion& region) {
  if (region.rho.size() < 16) throw error("knothe_map: degenerate region profile");
  for (double r : region.rho) {
    if (!(r > 0)) throw error("knothe_map: region profile not star-shaped");
  }
  TransportMap map;
  map.region = region;
  map.region.area = region_area(region);
  map.disc_radius = std::sqrt(map.region.area / kPi);
  const int n = static_cast<int>(region.rho.size());
  const double dtheta = kTwoPi / n;
  map.sector_cum.resize(n + 1);
  map.sector_cum[0] = 0;
  for (int k = 0; k < n; ++k) {
    map.sector_cum[k + 1] =
        map.sector_cum[k] +
        segment_area(region.rho[k], region.rho[(k + 1) % n], dtheta, 1.0);
  }
  return map;
}

std::pair<double, double> TransportMap::forward(double x, double y) const {
  const double r_d = std::hypot(x, y);
  if (r_d > disc_radius * (1.0 + 1e-9)) {
    throw error("TransportMap::forward: point outside the disc");
  }
  const int n = static_cast<int>(region.rho.size());
  const double dtheta = kTwoPi / n;
  const double total = sector_cum[n];

  // First step: monotone map of angular sectors (equal cumulative area).
  const double theta_d = wrap_angle(std::atan2(y, x));
  const double target = std::min(total * (theta_d / kTwoPi), total);
  const auto it = std::upper_bound(sector_cum.begin(), sector_cum.end(), target);
  int k = std::max(0, static_cast<int>(it - sector_cum.begin()) - 1);
  k = std::min(k, n - 1);
  const double rho0 = region.rho[k], rho1 = region.rho[(k + 1) % n];
  const double want = target - sector_cum[k];
  // Invert the cubic segment cumulative (monotone in t): safeguarded Newton.
  const double seg_total = segment_area(rho0, rho1, dtheta, 1.0);
  double t = std::clamp(want / std::max(seg_total, 1e-300), 0.0, 1.0);
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double g = segment_area(rho0, rho1, dtheta, t) - want;
    if (g > 0) {
      hi = t;
    } else {
      lo = t;
    }
    const double rho_t = rho0 + (rho1 - rho0) * t;
    const double dg = 0.5 * dtheta * rho_t * rho_t;
    double next = dg > 1e-300 ? t - g / dg : 0.5 * (lo + hi);
    if (!(next >= lo) || !(next <= hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-16) {
      t = next;
      break;
    }
    t = next;
  }
  const double theta = dtheta * (k + t);
  const double rho_theta = rho0 + (rho1 - rho0) * t;

  // Second step: linear radial stretch within the ray; together with the
  // sector map the Jacobian determinant is identically 1.
  const double r = rho_theta * std::min(r_d / disc_radius, 1.0);
  return {region.center[0] + r * std::cos(theta),
          region.center[1] + r * std::sin(theta)};
}

DiscField radial_cutoff(DiscField h, double disc_radius, double eps) {
  if (!(disc_radius > 0)) throw error("radial_cutoff: disc radius must be positive");
  if (!(eps > 0) || !(eps < disc_radius / 4.0)) {
    throw error("radial_cutoff: eps must lie in (0, R/4)");
  }
  const double r0 = disc_radius - 2.0 * eps;  // cutoff starts here
  const double r1 = disc_radius - eps;        // fully flat beyond here
  return [h = std::move(h), r0, r1, eps](double x, double y) -> double {
    const double r = std::hypot(x, y);
    if (r <= r0) return h(x, y);
    const double c = r > 1e-300 ? x / r : 1.0;
    const double s = r > 1e-300 ? y / r : 0.0;
    // h~(r) = a(r) h(r) - integral_{r0}^{min(r, r1)} a'(s) h(s) ds with the
    // smoothstep a = 1 on [0, r0], a = 0 on [r1, R]; this equals
    // h(r0) + integral_{r0}^{r} a h' (by parts) but needs only point values.
    auto a_of = [r0, r1, eps](double s_) {
      if (s_ <= r0) return 1.0;
      if (s_ >= r1) return 0.0;
      const double u = (s_ - r0) / eps;
      return 1.0 - u * u * (3.0 - 2.0 * u);
    };
    auto da_of = [r0, r1, eps](double s_) {
      if (s_ <= r0 || s_ >= r1) return 0.0;
      const double u = (s_ - r0) / eps;
      return -6.0 * u * (1.0 - u) / eps;
    };
    const double upper = std::min(r, r1);
    const int panels = 48;  // Simpson; the integrand is a smooth bump
    const double step = (upper - r0) / panels;
    double integral = 0;
    for (int k = 0; k <= panels; ++k) {
      const double sr = r0 + step * k;
      const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      integral += w * da_of(sr) * h(c * sr, s * sr);
    }
    integral *= step / 3.0;
    return a_of(r) * h(c * r, s * r) - integral;
  };
}

double sharp_disc_radius() { return std::sqrt(0.5 / kPi); }

std::pair<ScalarField, ScalarField> build_sharp_pair(const TriMesh& mesh,
                                                     double eps) {
  const PlanarRegion sigma = build_sigma();
  const TransportMap map = knothe_map(sigma);
  const double radius = map.disc_radius;

  DiscField fx = [map](double x, double y) { return map.forward(x, y).first; };
  DiscField fy = [map](double x, double y) { return map.forward(x, y).second; };
  DiscField fx_cut = radial_cutoff(std::move(fx), radius, eps);
  DiscField fy_cut = radial_cutoff(std::move(fy), radius, eps);

  ScalarField f, g;
  f.values.resize(mesh.vertices.size());
  g.values.resize(mesh.vertices.size());
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec3& p = mesh.vertices[v];
    // Equal-area azimuthal projection of each hemisphere onto the disc;
    // both copies carry the same data, glued along the equator.
    const double az = std::abs(p.z);
    const double m = radius * std::sqrt(1.0 / (1.0 + az));
    double dx = m * p.x, dy = m * p.y;
    const double rd = std::hypot(dx, dy);
    if (rd > radius) {
      const double shrink = radius / rd;
      dx *= shrink;
      dy *= shrink;
    }
    f.values[v] = fx_cut(dx, dy);
    g.values[v] = fy_cut(dx, dy);
  }
  return {std::move(f), std::move(g)};
}

}  // namespace qslab

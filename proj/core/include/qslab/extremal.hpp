#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "qslab/field.hpp"
#include "qslab/mesh.hpp"

namespace qslab {

/// Parameters of the near-extremal planar region: a star-shaped smoothing
/// of four mass lobes (one per constraint cell) joined through the central
/// body.
struct SigmaParams {
  double connector_width = 0.08;  // minimum radial thickness of the body
  double smoothing = 0.7;         // angular width scale of the lobes (radians)
};

/// Star-shaped region { center + r e(theta) : 0 <= r < rho(theta) } with a
/// piecewise-linear periodic radial profile.  Star shape keeps the polar
/// transport map continuous and pinch-free.
struct PlanarRegion {
  std::array<double, 2> center{0, 0};
  std::vector<double> rho;  // samples at theta_k = 2 pi k / N, N = rho.size()
  double area = 0;

  double rho_at(double theta) const;
  /// Area of the sector swept from angle 0 to theta (exact for the PL profile).
  double sector_cumulative(double theta) const;
};

/// Rectangle and disc profiles (test substrates for the transport map).
PlanarRegion box_region(double x0, double x1, double y0, double y1,
                        int samples = 4096);
PlanarRegion disc_region(double radius, int samples = 4096);

/// The tuned near-extremal region: area 1/2, connected, with pushforward
/// medians of x, y and x+y at 0, 0 and 1/2 (each half-mass within 1%).
/// Throws when the constraint check fails or the parameters are degenerate.
PlanarRegion build_sigma(const SigmaParams& params = {});

/// Two-step monotone rearrangement from the disc of equal area: monotone
/// map of angular sectors, then a linear radial stretch within each ray;
/// the Jacobian determinant is 1 identically.
struct TransportMap {
  PlanarRegion region;
  double disc_radius = 0;
  std::vector<double> sector_cum;  // cumulative sector area at each sample

  /// Image of a disc point (x, y); throws outside the disc.
  std::pair<double, double> forward(double x, double y) const;
};
TransportMap knothe_map(const PlanarRegion& region);

/// Scalar data on the transport disc.
using DiscField = std::function<double(double x, double y)>;

/// h~(r, t) = h(0) + integral_0^r a(s) dh/dr ds with a smoothstep cutoff:
/// a = 1 on [0, R-2eps], a = 0 on [R-eps, R]; kills radial derivatives at
/// the rim so the two hemisphere copies glue smoothly.
DiscField radial_cutoff(DiscField h, double disc_radius, double eps);

/// The near-extremal pair: cutoff coordinates of the transport map pulled
/// back to both hemispheres through the equal-area azimuthal projection.
std::pair<ScalarField, ScalarField> build_sharp_pair(const TriMesh& mesh, double eps);

/// Radius of the transport disc used by build_sharp_pair.
double sharp_disc_radius();

}  // namespace qslab

#ifndef MVD_OPINIONS_HPP
#define MVD_OPINIONS_HPP

#include <utility>

#include "mvd/plf.hpp"
#include "mvd/rng.hpp"

namespace mvd {

/// Endpoint pair (y,z) of a symmetric triangular density on [min(y,z), max(y,z)].
struct TriangularParams {
  double y = 0.0;
  double z = 0.0;

  double low() const { return y < z ? y : z; }
  double high() const { return y < z ? z : y; }
  double width() const { return high() - low(); }
};

/// Symmetric triangular density on [low, high]: peak 2/width at the midpoint,
/// zero outside. Throws for degenerate support (a point mass has no density).
PiecewiseLinearFn triangular_density(const TriangularParams& p);

/// (y,z) uniform on {(y,z) in [0,1]^2 : |y-z| >= gamma} by rejection from the
/// unit square; gamma = 0 resamples the measure-zero event y = z.
std::pair<TriangularParams, PiecewiseLinearFn> sample_initial(Rng& rng, double gamma);

/// Intensity density of the unrestricted random triangular opinion.
double phi(double x);

/// Intensity density of the gamma-restricted random triangular opinion.
/// x is folded to [0,1/2] before the regime dispatch; the case conditions are
/// evaluated exactly as stated (x vs gamma, 1-gamma, gamma/2), which also
/// resolves the regime order for gamma > 1/2.
double phi_gamma(double gamma, double x);

/// PLF tabulation of phi (gamma = 0) or phi_gamma on all regime boundaries
/// plus n uniform subdivision points per regime. No renormalization: for
/// n >= 1024 the tabulated integral must be within 1e-6 of 1 or a
/// tabulation-error exception is thrown.
PiecewiseLinearFn intensity_plf(double gamma, int n);

/// Tabulation with the subdivision count doubled (up to 2^15 per regime)
/// until the result passes the strict density gate; used wherever a tabulated
/// intensity feeds tv_distance.
PiecewiseLinearFn intensity_density(double gamma);

/// Monte Carlo estimate of the intensity on a uniform grid with `grid` cells:
/// node values are the empirical mean mass in the half-cell window around
/// the node divided by the window width (exact per-sample CDF arithmetic).
/// The averaged MEASURE converges even where pointwise density averages have
/// heavy tails (unrestricted samples have E[f(x)^2] = infinity). A single
/// sample (n_samples = 1) is returned verbatim, the mean of one density being
/// that density.
PiecewiseLinearFn monte_carlo_intensity(Rng& rng, double gamma, long n_samples, int grid);

}  // namespace mvd

#endif

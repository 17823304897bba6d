#ifndef MVD_THRESHOLD_HPP
#define MVD_THRESHOLD_HPP

#include <functional>
#include <stdexcept>
#include <vector>

namespace mvd {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Carries the best partial result when the subdivision depth limit is hit.
struct ConvergenceError : std::runtime_error {
  QuadratureResult partial;
  ConvergenceError(const char* msg, QuadratureResult r)
      : std::runtime_error(msg), partial(r) {}
};

/// Deterministic adaptive Simpson integration with Richardson acceptance
/// (|S2-S1|/15 error gauge); subdivision is seeded at forced_splits and the
/// tolerance is distributed across panels proportionally to width. Depth
/// beyond 60 raises ConvergenceError with the partial result.
QuadratureResult adaptive_quad(const std::function<double(double)>& fn, double a, double b,
                               std::vector<double> forced_splits, double tol);

/// The consensus threshold: (1/2) * int_0^1 |f_(gamma,0) - phi_gamma|, where
/// f_(gamma,0) is the extreme restricted triangle on [0, gamma]. Splits are
/// forced at every kink of the integrand plus the sign-change roots of the
/// difference (bracketed on a 4096-point grid per smooth piece, bisected to
/// 1e-12).
QuadratureResult theta_c_quad(double gamma, double tol);
double theta_c(double gamma, double tol);

/// Closed form E[int f^2] for the gamma-restricted triangular opinion:
/// -8/(3(1-gamma)) * (1 + ln(gamma)/(1-gamma)). Diverges as gamma -> 0.
double expected_energy(double gamma);

}  // namespace mvd

#endif

#ifndef MVD_PLF_HPP
#define MVD_PLF_HPP

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mvd {

// Tolerances shared across the library.
inline constexpr double kDensityTol = 1e-9;        // |integral - 1| bound for densities
inline constexpr double kGridDedupTol = 1e-14;     // breakpoints closer than this are merged
inline constexpr double kDefaultSimplifyTol = 1e-12;

using GridPtr = std::shared_ptr<const std::vector<double>>;

GridPtr make_grid(std::vector<double> xs);

/// Continuous piecewise-linear function on [0,1] with nonnegative values.
/// Breakpoint grids are shared between instances whenever possible, so that
/// repeated pairwise operations on a lattice degenerate to cheap value-array
/// zips once the grids have unified.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<double> values);
  PiecewiseLinearFn(GridPtr breakpoints, std::vector<double> values);

  static PiecewiseLinearFn constant(double value);

  const std::vector<double>& breakpoints() const { return *xs_; }
  const GridPtr& grid() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }
  std::size_t size() const { return ys_.size(); }

  double operator()(double x) const;

  /// Exact integral over [0,1] (trapezoid rule is exact for linear pieces);
  /// computed once at construction.
  double integral() const { return integral_; }
  double cdf(double x) const;

  bool is_density(double tol = kDensityTol) const;
  void require_density(const char* caller) const;

 private:
  GridPtr xs_;
  std::vector<double> ys_;
  double integral_ = 0.0;

  void validate_and_finish();
};

inline double evaluate(const PiecewiseLinearFn& f, double x) { return f(x); }

/// (1-mu)*f + mu*g on the merged breakpoint grid. Throws std::invalid_argument
/// for mu outside (0, 1/2] and if either input is not a density; the result is
/// checked to be a density again (mass conservation is a hard contract).
PiecewiseLinearFn mix(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, double mu);

/// Both update results of one pairwise encounter, sharing one merged grid:
/// {(1-mu)f + mu g, mu f + (1-mu)g}.
std::pair<PiecewiseLinearFn, PiecewiseLinearFn> mix_pair(const PiecewiseLinearFn& f,
                                                         const PiecewiseLinearFn& g, double mu);

/// Exact (1/2)*int |f-g|: every merged segment is split at its sign-change
/// root before the trapezoid areas are summed.
double tv_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g);

/// Exact int f^2 (per-segment closed form).
double l2_energy(const PiecewiseLinearFn& f);

/// Exact int (f-g)^2 on the merged grid.
double l2_distance_sq(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g);

inline double cdf(const PiecewiseLinearFn& f, double x) { return f.cdf(x); }

/// Levy distance within tol by bisection over the feasibility predicate
///   F(x-eps)-eps <= G(x) <= F(x+eps)+eps  for all x,
/// checked exactly on the kink grid of both piecewise-quadratic CDFs plus the
/// interior extrema of each quadratic piece. Returns a feasible eps, hence a
/// value in [levy, levy + tol].
double levy_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, double tol);

/// Removes breakpoints that are collinear with their retained neighbours
/// within tol in sup-norm; the exact-collinear ones are always removed.
/// Returns the input unchanged (shared grid preserved) if nothing is removable.
PiecewiseLinearFn simplify(const PiecewiseLinearFn& f, double tol);

/// sup |f-g|; exact, since the sup of a piecewise-linear difference is
/// attained on the merged breakpoint grid.
double sup_diff(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g);

GridPtr merge_grids(const GridPtr& a, const GridPtr& b);

/// CSV serialization: header "breakpoint,value", one "x,y" pair per line,
/// 17 significant digits (round-trips exactly).
void write_csv(std::ostream& os, const PiecewiseLinearFn& f);
PiecewiseLinearFn read_csv(std::istream& is);

}  // namespace mvd

#endif

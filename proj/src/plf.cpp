#include "mvd/plf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace mvd {

namespace {

double interp(double xl, double yl, double xr, double yr, double x) {
  const double t = (x - xl) / (xr - xl);
  // Both terms nonnegative for nonnegative values, so no negative roundoff.
  return yl * (1.0 - t) + yr * t;
}

// Values of f resampled onto a grid that contains f's grid up to kGridDedupTol.
std::vector<double> resample(const PiecewiseLinearFn& f, const std::vector<double>& grid) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  std::vector<double> out(grid.size());
  std::size_t seg = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid[j];
    while (seg + 2 < xs.size() && xs[seg + 1] <= x) ++seg;
    if (x == xs[seg]) {
      out[j] = ys[seg];
    } else if (x == xs[seg + 1]) {
      out[j] = ys[seg + 1];
    } else {
      out[j] = interp(xs[seg], ys[seg], xs[seg + 1], ys[seg + 1], x);
    }
  }
  return out;
}

// |h| integrated over one segment, h linear with endpoint values a, b.
double abs_trapezoid(double w, double a, double b) {
  if (a >= 0.0 && b >= 0.0) return 0.5 * w * (a + b);
  if (a <= 0.0 && b <= 0.0) return -0.5 * w * (a + b);
  return 0.5 * w * (a * a + b * b) / std::abs(a - b);
}

void format17(char* buf, std::size_t n, double v) { std::snprintf(buf, n, "%.17g", v); }

}  // namespace

GridPtr make_grid(std::vector<double> xs) {
  return std::make_shared<const std::vector<double>>(std::move(xs));
}

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<double> values)
    : xs_(make_grid(std::move(breakpoints))), ys_(std::move(values)) {
  validate_and_finish();
}

PiecewiseLinearFn::PiecewiseLinearFn(GridPtr breakpoints, std::vector<double> values)
    : xs_(std::move(breakpoints)), ys_(std::move(values)) {
  validate_and_finish();
}

void PiecewiseLinearFn::validate_and_finish() {
  const auto& xs = *xs_;
  if (xs.size() < 2 || xs.size() != ys_.size())
    throw std::invalid_argument("PiecewiseLinearFn: need matching breakpoint/value sequences of length >= 2");
  if (xs.front() != 0.0 || xs.back() != 1.0)
    throw std::invalid_argument("PiecewiseLinearFn: breakpoints must span [0,1] exactly");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1]))
      throw std::invalid_argument("PiecewiseLinearFn: breakpoints must be strictly increasing");
  double acc = 0.0;
  for (std::size_t i = 0; i < ys_.size(); ++i) {
    if (!std::isfinite(ys_[i]) || ys_[i] < 0.0)
      throw std::invalid_argument("PiecewiseLinearFn: values must be finite and >= 0");
    if (i + 1 < ys_.size()) acc += 0.5 * (xs[i + 1] - xs[i]) * (ys_[i] + ys_[i + 1]);
  }
  integral_ = acc;
}

PiecewiseLinearFn PiecewiseLinearFn::constant(double value) {
  return PiecewiseLinearFn(std::vector<double>{0.0, 1.0}, std::vector<double>{value, value});
}

double PiecewiseLinearFn::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("PiecewiseLinearFn: x outside [0,1]");
  const auto& xs = *xs_;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t seg = (it == xs.end()) ? xs.size() - 2 : static_cast<std::size_t>(it - xs.begin()) - 1;
  if (x == xs[seg]) return ys_[seg];
  if (x == xs[seg + 1]) return ys_[seg + 1];
  return interp(xs[seg], ys_[seg], xs[seg + 1], ys_[seg + 1], x);
}

double PiecewiseLinearFn::cdf(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("cdf: x outside [0,1]");
  if (x == 1.0) return integral_;
  const auto& xs = *xs_;
  double acc = 0.0;
  std::size_t i = 0;
  while (i + 1 < xs.size() && xs[i + 1] <= x) {
    acc += 0.5 * (xs[i + 1] - xs[i]) * (ys_[i] + ys_[i + 1]);
    ++i;
  }
  if (i + 1 < xs.size() && x > xs[i]) {
    const double yx = interp(xs[i], ys_[i], xs[i + 1], ys_[i + 1], x);
    acc += 0.5 * (x - xs[i]) * (ys_[i] + yx);
  }
  return acc;
}

bool PiecewiseLinearFn::is_density(double tol) const { return std::abs(integral_ - 1.0) <= tol; }

void PiecewiseLinearFn::require_density(const char* caller) const {
  if (!is_density())
    throw std::invalid_argument(std::string(caller) + ": argument is not a density (|integral-1| = " +
                                std::to_string(std::abs(integral_ - 1.0)) + ")");
}

GridPtr merge_grids(const GridPtr& a, const GridPtr& b) {
  if (a == b) return a;
  const auto& xa = *a;
  const auto& xb = *b;
  if (xa == xb) return a;
  std::vector<double> out;
  out.reserve(xa.size() + xb.size());
  std::size_t i = 0, j = 0;
  while (i < xa.size() || j < xb.size()) {
    double next;
    if (j == xb.size() || (i < xa.size() && xa[i] <= xb[j])) {
      next = xa[i++];
      if (j < xb.size() && xb[j] - next < kGridDedupTol) ++j;
    } else {
      next = xb[j++];
      if (i < xa.size() && xa[i] - next < kGridDedupTol) ++i;
    }
    out.push_back(next);
  }
  if (out == xa) return a;
  if (out == xb) return b;
  return make_grid(std::move(out));
}

namespace {

// Both value arrays on the common grid; avoids copies when the grids already
// coincide.
struct Aligned {
  GridPtr grid;
  std::vector<double> fa_store, fb_store;
  const std::vector<double>* fa = nullptr;
  const std::vector<double>* fb = nullptr;
};

Aligned align(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
  Aligned r;
  r.grid = merge_grids(f.grid(), g.grid());
  if (r.grid == f.grid() || *r.grid == *f.grid()) {
    r.fa = &f.values();
  } else {
    r.fa_store = resample(f, *r.grid);
    r.fa = &r.fa_store;
  }
  if (r.grid == g.grid() || *r.grid == *g.grid()) {
    r.fb = &g.values();
  } else {
    r.fb_store = resample(g, *r.grid);
    r.fb = &r.fb_store;
  }
  return r;
}

}  // namespace

PiecewiseLinearFn mix(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, double mu) {
  if (!(mu > 0.0 && mu <= 0.5)) throw std::invalid_argument("mix: mu must lie in (0, 1/2]");
  f.require_density("mix");
  g.require_density("mix");
  Aligned a = align(f, g);
  std::vector<double> ys(a.grid->size());
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = (1.0 - mu) * (*a.fa)[i] + mu * (*a.fb)[i];
  PiecewiseLinearFn out(a.grid, std::move(ys));
  if (!out.is_density())
    throw std::logic_error("mix: result lost normalization (mass conservation violated)");
  return out;
}

std::pair<PiecewiseLinearFn, PiecewiseLinearFn> mix_pair(const PiecewiseLinearFn& f,
                                                         const PiecewiseLinearFn& g, double mu) {
  if (!(mu > 0.0 && mu <= 0.5)) throw std::invalid_argument("mix_pair: mu must lie in (0, 1/2]");
  f.require_density("mix_pair");
  g.require_density("mix_pair");
  Aligned a = align(f, g);
  const std::size_t n = a.grid->size();
  std::vector<double> y1(n), y2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (*a.fa)[i], v = (*a.fb)[i];
    y1[i] = (1.0 - mu) * u + mu * v;
    y2[i] = mu * u + (1.0 - mu) * v;
  }
  PiecewiseLinearFn h1(a.grid, std::move(y1));
  PiecewiseLinearFn h2(a.grid, std::move(y2));
  if (!h1.is_density() || !h2.is_density())
    throw std::logic_error("mix_pair: result lost normalization (mass conservation violated)");
  return {std::move(h1), std::move(h2)};
}

double tv_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
  f.require_density("tv_distance");
  g.require_density("tv_distance");
  Aligned al = align(f, g);
  const auto& xs = *al.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double a = (*al.fa)[i] - (*al.fb)[i];
    const double b = (*al.fa)[i + 1] - (*al.fb)[i + 1];
    acc += abs_trapezoid(xs[i + 1] - xs[i], a, b);
  }
  return 0.5 * acc;
}

double l2_energy(const PiecewiseLinearFn& f) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double a = ys[i], b = ys[i + 1];
    acc += (xs[i + 1] - xs[i]) * (a * a + a * b + b * b) / 3.0;
  }
  return acc;
}

double l2_distance_sq(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
  Aligned al = align(f, g);
  const auto& xs = *al.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double a = (*al.fa)[i] - (*al.fb)[i];
    const double b = (*al.fa)[i + 1] - (*al.fb)[i + 1];
    acc += (xs[i + 1] - xs[i]) * (a * a + a * b + b * b) / 3.0;
  }
  return acc;
}

double sup_diff(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
  Aligned al = align(f, g);
  double m = 0.0;
  for (std::size_t i = 0; i < al.grid->size(); ++i)
    m = std::max(m, std::abs((*al.fa)[i] - (*al.fb)[i]));
  return m;
}

namespace {

// Exact CDF evaluator over precomputed prefix integrals, with the convention
// F(x) = 0 for x < 0 and F(x) = F(1) for x > 1.
struct CdfEval {
  const std::vector<double>* xs;
  const std::vector<double>* ys;
  std::vector<double> prefix;

  explicit CdfEval(const PiecewiseLinearFn& f) : xs(&f.breakpoints()), ys(&f.values()) {
    prefix.resize(xs->size(), 0.0);
    for (std::size_t i = 0; i + 1 < xs->size(); ++i)
      prefix[i + 1] =
          prefix[i] + 0.5 * ((*xs)[i + 1] - (*xs)[i]) * ((*ys)[i] + (*ys)[i + 1]);
  }

  double density(double x) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    auto it = std::upper_bound(xs->begin(), xs->end(), x);
    std::size_t seg = (it == xs->end()) ? xs->size() - 2 : static_cast<std::size_t>(it - xs->begin()) - 1;
    return interp((*xs)[seg], (*ys)[seg], (*xs)[seg + 1], (*ys)[seg + 1], x);
  }

  double operator()(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return prefix.back();
    auto it = std::upper_bound(xs->begin(), xs->end(), x);
    std::size_t seg = static_cast<std::size_t>(it - xs->begin()) - 1;
    const double yx = interp((*xs)[seg], (*ys)[seg], (*xs)[seg + 1], (*ys)[seg + 1], x);
    return prefix[seg] + 0.5 * (x - (*xs)[seg]) * ((*ys)[seg] + yx);
  }
};

// min over [0,1] of  s*(F(x + s*eps) + eps) - s*G(x)  for s = +1  reduces to
// checking the two one-sided feasibility conditions; this helper returns the
// minimum of  F(x+shift) + c - G(x)  over x in [0,1], where the minimum of a
// piecewise-quadratic is attained at a kink or at an interior stationary
// point (the difference of the two densities is linear per piece).
double min_margin(const CdfEval& F, const CdfEval& G, double shift, double c,
                  const std::vector<double>& kinks) {
  double best = std::numeric_limits<double>::infinity();
  auto phi = [&](double x) { return F(x + shift) + c - G(x); };
  for (std::size_t i = 0; i < kinks.size(); ++i) {
    best = std::min(best, phi(kinks[i]));
    if (i + 1 < kinks.size()) {
      const double a = kinks[i], b = kinks[i + 1];
      // stationary point: F'(x+shift) = G'(x), both linear on (a,b)
      const double fa = F.density(a + shift) - G.density(a);
      const double fb = F.density(b + shift) - G.density(b);
      if ((fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0)) {
        const double t = fa / (fa - fb);
        best = std::min(best, phi(a + t * (b - a)));
      }
    }
  }
  return best;
}

bool levy_feasible(const CdfEval& F, const CdfEval& G, double eps) {
  // Kink candidates for x -> F(x + eps) - G(x) and its mirrored counterpart:
  // both grids, both grids shifted by +-eps, and the clamp points where the
  // shifted argument crosses 0 or 1.
  std::vector<double> kinks;
  kinks.reserve(3 * (F.xs->size() + G.xs->size()) + 4);
  for (const auto* grid : {F.xs, G.xs}) {
    for (double x : *grid) {
      kinks.push_back(x);
      kinks.push_back(x - eps);
      kinks.push_back(x + eps);
    }
  }
  kinks.push_back(eps);
  kinks.push_back(1.0 - eps);
  for (double& x : kinks) x = std::min(1.0, std::max(0.0, x));
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  constexpr double slack = 1e-12;
  // G(x) <= F(x+eps) + eps, i.e. min_x [F(x+eps) + eps - G(x)] >= 0
  if (min_margin(F, G, eps, eps, kinks) < -slack) return false;
  // F(x-eps) - eps <= G(x); substituting u = x - eps this is
  // min_u [G(u+eps) + eps - F(u)] >= 0 (the out-of-range parts are vacuous).
  if (min_margin(G, F, eps, eps, kinks) < -slack) return false;
  return true;
}

}  // namespace

double levy_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("levy_distance: tol must be > 0");
  f.require_density("levy_distance");
  g.require_density("levy_distance");
  CdfEval F(f), G(g);
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (levy_feasible(F, G, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

PiecewiseLinearFn simplify(const PiecewiseLinearFn& f, double tol) {
  if (tol < 0.0) throw std::invalid_argument("simplify: tol must be >= 0");
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  const std::size_t n = xs.size();

  // Pass 1: drop exactly-collinear interior points (transitive for exact
  // collinearity, so a single scan suffices).
  std::vector<std::size_t> keep;
  keep.reserve(n);
  keep.push_back(0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const std::size_t p = keep.back();
    const double lhs = (ys[i] - ys[p]) * (xs[i + 1] - xs[p]);
    const double rhs = (ys[i + 1] - ys[p]) * (xs[i] - xs[p]);
    if (lhs != rhs) keep.push_back(i);
  }
  keep.push_back(n - 1);

  // Pass 2: greedy chord extension; every skipped original breakpoint must be
  // within tol of the chord. The sup-norm deviation of the result from f is
  // attained at original breakpoints, so this check is exact.
  std::vector<std::size_t> kept;
  if (tol > 0.0) {
    kept.push_back(keep.front());
    std::size_t a = 0;  // index into keep
    while (a + 1 < keep.size()) {
      std::size_t e = a + 1;
      while (e + 1 < keep.size()) {
        const std::size_t ia = keep[a], ie = keep[e + 1];
        bool ok = true;
        for (std::size_t j = ia + 1; j < ie && ok; ++j) {
          const double chord = interp(xs[ia], ys[ia], xs[ie], ys[ie], xs[j]);
          if (std::abs(ys[j] - chord) > tol) ok = false;
        }
        if (!ok) break;
        ++e;
      }
      kept.push_back(keep[e]);
      a = e;
    }
  } else {
    kept = keep;
  }

  if (kept.size() == n) return f;
  std::vector<double> nx(kept.size()), ny(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    nx[i] = xs[kept[i]];
    ny[i] = ys[kept[i]];
  }
  return PiecewiseLinearFn(std::move(nx), std::move(ny));
}

void write_csv(std::ostream& os, const PiecewiseLinearFn& f) {
  os << "breakpoint,value\n";
  char bx[32], by[32];
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    format17(bx, sizeof bx, xs[i]);
    format17(by, sizeof by, ys[i]);
    os << bx << ',' << by << '\n';
  }
}

PiecewiseLinearFn read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("breakpoint,value", 0) != 0)
    throw std::invalid_argument("read_csv: missing 'breakpoint,value' header");
  std::vector<double> xs, ys;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || *end != ',') throw std::invalid_argument("read_csv: malformed line: " + line);
    const char* s2 = end + 1;
    const double y = std::strtod(s2, &end);
    if (end == s2) throw std::invalid_argument("read_csv: malformed line: " + line);
    xs.push_back(x);
    ys.push_back(y);
  }
  return PiecewiseLinearFn(std::move(xs), std::move(ys));
}

}  // namespace mvd

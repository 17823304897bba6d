#include "mvd/opinions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvd {

namespace {

const double kLn2 = std::log(2.0);

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

TriangularParams sample_params(Rng& rng, double gamma) {
  for (;;) {
    TriangularParams p{rng.uniform01(), rng.uniform01()};
    if (p.width() < gamma || p.width() == 0.0) continue;
    const double mid = 0.5 * (p.low() + p.high());
    if (!(p.low() < mid && mid < p.high())) continue;  // unrepresentably narrow
    return p;
  }
}

}  // namespace

PiecewiseLinearFn triangular_density(const TriangularParams& p) {
  const double m = p.low(), M = p.high();
  const double w = M - m;
  if (w == 0.0) throw std::invalid_argument("triangular_density: degenerate support (width 0)");
  const double mid = 0.5 * (m + M);
  if (!(m < mid && mid < M))
    throw std::invalid_argument("triangular_density: support too narrow to represent");

  // Breakpoints {0, m, mid, M, 1}, with m and M folded onto the domain edges
  // when they coincide with them; the density vanishes at both roots.
  std::vector<double> xs{0.0}, ys{0.0};
  if (m > kGridDedupTol) {
    xs.push_back(m);
    ys.push_back(0.0);
  }
  xs.push_back(mid);
  ys.push_back(2.0 / w);
  if (M < 1.0 - kGridDedupTol) {
    xs.push_back(M);
    ys.push_back(0.0);
  }
  xs.push_back(1.0);
  ys.push_back(0.0);
  return PiecewiseLinearFn(std::move(xs), std::move(ys));
}

std::pair<TriangularParams, PiecewiseLinearFn> sample_initial(Rng& rng, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("sample_initial: gamma must lie in [0,1)");
  TriangularParams p = sample_params(rng, gamma);
  return {p, triangular_density(p)};
}

double phi(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("phi: x outside [0,1]");
  if (x <= 0.5) return -8.0 * (xlogx(1.0 - x) + x * (1.0 - kLn2));
  return -8.0 * (xlogx(x) + (1.0 - x) * (1.0 - kLn2));
}

double phi_gamma(double gamma, double x) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("phi_gamma: gamma must lie in (0,1)");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("phi_gamma: x outside [0,1]");
  const double xf = std::min(x, 1.0 - x);
  const double c = -8.0 / ((1.0 - gamma) * (1.0 - gamma));
  if (xf >= gamma)
    return c * (xlogx(1.0 - xf) + xf * (1.0 - kLn2) + 0.25 * gamma);
  if (xf >= 1.0 - gamma) {
    if (xf <= 0.5 * gamma)
      return c * ((1.0 - xf) * std::log(gamma) + xf + (1.0 - 2.0 * xf) / (2.0 * gamma) -
                  0.5 * gamma);
    return c * (-xf * std::log(2.0 * xf) + std::log(gamma) + xf +
                ((1.0 - xf) * (1.0 - xf) + xf * xf) / (2.0 * gamma) - 0.75 * gamma);
  }
  if (xf <= 0.5 * gamma)
    return c * (xlogx(1.0 - xf) + xf - xf * xf / (2.0 * gamma));
  return c * (xlogx(1.0 - xf) - xf * std::log(2.0 * xf / gamma) + xf +
              xf * xf / (2.0 * gamma) - 0.25 * gamma);
}

PiecewiseLinearFn intensity_plf(double gamma, int n) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("intensity_plf: gamma must lie in [0,1)");
  if (n < 16) throw std::invalid_argument("intensity_plf: n must be >= 16");

  std::vector<double> bounds{0.0, 0.5};
  if (gamma > 0.0) {
    for (double b : {0.5 * gamma, gamma, 1.0 - gamma})
      if (b > 0.0 && b < 0.5) bounds.push_back(b);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return b - a < kGridDedupTol; }),
               bounds.end());
  // mirror the folded boundaries onto the right half
  for (std::size_t i = bounds.size(); i-- > 1;) bounds.push_back(1.0 - bounds[i - 1]);

  std::vector<double> xs;
  xs.reserve((bounds.size() - 1) * static_cast<std::size_t>(n) + 1);
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double a = bounds[b], c = bounds[b + 1];
    for (int i = 0; i < n; ++i) xs.push_back(a + (c - a) * (static_cast<double>(i) / n));
  }
  xs.push_back(1.0);
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(gamma > 0.0 ? phi_gamma(gamma, x) : phi(x));

  PiecewiseLinearFn out(std::move(xs), std::move(ys));
  if (n >= 1024 && std::abs(out.integral() - 1.0) > 1e-6)
    throw std::runtime_error("intensity_plf: tabulation error, integral deviates by more than 1e-6");
  return out;
}

PiecewiseLinearFn intensity_density(double gamma) {
  for (int n = 1024; n <= (1 << 15); n *= 2) {
    PiecewiseLinearFn f = intensity_plf(gamma, n);
    if (f.is_density()) return f;
  }
  throw std::runtime_error("intensity_density: tabulation does not reach the density gate");
}

namespace {

// Exact CDF of the symmetric triangle on [m, M].
double triangle_cdf(double m, double M, double x) {
  if (x <= m) return 0.0;
  if (x >= M) return 1.0;
  const double t = (x - m) / (M - m);
  return t <= 0.5 ? 2.0 * t * t : 1.0 - 2.0 * (1.0 - t) * (1.0 - t);
}

}  // namespace

PiecewiseLinearFn monte_carlo_intensity(Rng& rng, double gamma, long n_samples, int grid) {
  if (n_samples < 1) throw std::invalid_argument("monte_carlo_intensity: n_samples must be >= 1");
  if (grid < 2) throw std::invalid_argument("monte_carlo_intensity: grid must be >= 2");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("monte_carlo_intensity: gamma must lie in [0,1)");
  if (n_samples == 1) return sample_initial(rng, gamma).second;

  const int J = grid;
  const double h = 1.0 / J;
  // window around node j: [max(x_j - h/2, 0), min(x_j + h/2, 1)]
  std::vector<double> lo(J + 1), hi(J + 1), mass(J + 1, 0.0);
  for (int j = 0; j <= J; ++j) {
    const double x = static_cast<double>(j) / J;
    lo[j] = std::max(0.0, x - 0.5 * h);
    hi[j] = std::min(1.0, x + 0.5 * h);
  }
  for (long s = 0; s < n_samples; ++s) {
    const TriangularParams p = sample_params(rng, gamma);
    const double m = p.low(), M = p.high();
    const int j0 = std::max(0, static_cast<int>(std::floor((m - 0.5 * h) * J)));
    const int j1 = std::min(J, static_cast<int>(std::ceil((M + 0.5 * h) * J)));
    for (int j = j0; j <= j1; ++j)
      mass[j] += triangle_cdf(m, M, hi[j]) - triangle_cdf(m, M, lo[j]);
  }
  std::vector<double> xs(J + 1), ys(J + 1);
  for (int j = 0; j <= J; ++j) {
    xs[j] = static_cast<double>(j) / J;
    ys[j] = mass[j] / (static_cast<double>(n_samples) * (hi[j] - lo[j]));
  }
  xs.front() = 0.0;
  xs.back() = 1.0;
  return PiecewiseLinearFn(std::move(xs), std::move(ys));
}

}  // namespace mvd

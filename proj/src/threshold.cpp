#include "mvd/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "mvd/opinions.hpp"

namespace mvd {

namespace {

struct QuadWork {
  const std::function<double(double)>& fn;
  long evaluations = 0;
  double error_acc = 0.0;

  double eval(double x) {
    ++evaluations;
    return fn(x);
  }

  double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double refine(double a, double b, double fa, double fm, double fb, double whole, double tol,
                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double err = (left + right - whole) / 15.0;
    if (std::abs(err) <= tol) {
      error_acc += std::abs(err);
      return left + right + err;
    }
    if (depth >= 60)
      throw ConvergenceError("adaptive_quad: no convergence at depth 60",
                             QuadratureResult{left + right + err, std::abs(err), evaluations});
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  double panel(double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = eval(a), fm = eval(m), fb = eval(b);
    return refine(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0);
  }
};

}  // namespace

QuadratureResult adaptive_quad(const std::function<double(double)>& fn, double a, double b,
                               std::vector<double> forced_splits, double tol) {
  if (!(a < b)) throw std::invalid_argument("adaptive_quad: need a < b");
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_quad: tol must be > 0");
  std::vector<double> cuts{a, b};
  for (double s : forced_splits)
    if (s > a && s < b) cuts.push_back(s);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  QuadWork w{fn};
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double share = tol * (cuts[i + 1] - cuts[i]) / (b - a);
    total += w.panel(cuts[i], cuts[i + 1], share);
  }
  return QuadratureResult{total, w.error_acc, w.evaluations};
}

double expected_energy(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("expected_energy: gamma must lie in (0,1)");
  return -8.0 / (3.0 * (1.0 - gamma)) * (1.0 + std::log(gamma) / (1.0 - gamma));
}

namespace {

// Density of the extreme restricted triangle on [0, gamma].
double extreme_triangle(double gamma, double x) {
  const double v = (2.0 / gamma) * (1.0 - (2.0 / gamma) * std::abs(x - 0.5 * gamma));
  return v > 0.0 ? v : 0.0;
}

}  // namespace

QuadratureResult theta_c_quad(double gamma, double tol) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("theta_c: gamma must lie in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("theta_c: tol must be > 0");

  auto diff = [gamma](double x) { return extreme_triangle(gamma, x) - phi_gamma(gamma, x); };

  // Kinks of the integrand: the triangle's peak and right root plus every
  // regime boundary of phi_gamma (both halves).
  std::vector<double> kinks;
  for (double s : {0.5 * gamma, gamma, 1.0 - gamma, 0.5, 0.5 * (1.0 + gamma), 1.0 - 0.5 * gamma})
    if (s > 0.0 && s < 1.0) kinks.push_back(s);
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  // Sign-change roots of the difference, bracketed on a 4096-point grid per
  // smooth piece and bisected to 1e-12.
  std::vector<double> pieces{0.0};
  pieces.insert(pieces.end(), kinks.begin(), kinks.end());
  pieces.push_back(1.0);
  std::vector<double> splits = kinks;
  for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
    const double a = pieces[p], b = pieces[p + 1];
    const int grid = 4096;
    double xl = a, fl = diff(xl);
    for (int i = 1; i <= grid; ++i) {
      const double xr = a + (b - a) * (static_cast<double>(i) / grid);
      const double fr = diff(xr);
      if ((fl < 0.0 && fr > 0.0) || (fl > 0.0 && fr < 0.0)) {
        double lo = xl, hi = xr, flo = fl;
        while (hi - lo > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          const double fmid = diff(mid);
          if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
          } else {
            hi = mid;
          }
        }
        splits.push_back(0.5 * (lo + hi));
      }
      xl = xr;
      fl = fr;
    }
  }

  QuadratureResult q = adaptive_quad([&](double x) { return std::abs(diff(x)); }, 0.0, 1.0,
                                     std::move(splits), tol);
  q.value *= 0.5;
  q.error_estimate *= 0.5;
  return q;
}

double theta_c(double gamma, double tol) { return theta_c_quad(gamma, tol).value; }

}  // namespace mvd

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mvd/opinions.hpp"
#include "mvd/threshold.hpp"

using namespace mvd;

namespace {

// Six-branch display of the intensity density for gamma = 1/3, written out
// independently of the general regime dispatch.
double phi_third_sixbranch(double x) {
  if (x <= 1.0 / 6.0) return -18.0 * ((1 - x) * std::log(1 - x) - 1.5 * x * x + x);
  if (x <= 1.0 / 3.0)
    return -18.0 * ((1 - x) * std::log(1 - x) - x * std::log(6 * x) + x + 1.5 * x * x - 1.0 / 12.0);
  if (x <= 0.5) return -18.0 * ((1 - x) * std::log(1 - x) + x * (1 - std::log(2.0)) + 1.0 / 12.0);
  if (x <= 2.0 / 3.0)
    return -18.0 * (x * std::log(x) + (1 - x) * (1 - std::log(2.0)) + 1.0 / 12.0);
  if (x <= 5.0 / 6.0)
    return -18.0 * (x * std::log(x) - (1 - x) * std::log(6 - 6 * x) + 1.5 * x * x - 4 * x +
                    29.0 / 12.0);
  return -18.0 * (x * std::log(x) - 1.5 * x * x + 2 * x - 0.5);
}

}  // namespace

TEST_CASE("triangular_density: shape and normalization") {
  SUBCASE("full-interval triangle") {
    const auto f = triangular_density({0.0, 1.0});
    CHECK(f.size() == 3);
    CHECK(f(0.5) == 2.0);
    CHECK(f.integral() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("triangle on [0,1/3]: peak 6 at 1/6") {
    const auto f = triangular_density({1.0 / 3.0, 0.0});
    CHECK(f(1.0 / 6.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(f(0.5) == 0.0);
  }
  SUBCASE("symmetric in (y,z)") {
    const auto a = triangular_density({0.3, 0.8});
    const auto b = triangular_density({0.8, 0.3});
    CHECK(sup_diff(a, b) == 0.0);
  }
  SUBCASE("degenerate support") {
    CHECK_THROWS_AS(triangular_density({0.4, 0.4}), std::invalid_argument);
  }
  SUBCASE("random parameters give exact densities") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
      const auto [p, f] = sample_initial(rng, 0.0);
      CHECK(std::abs(f.integral() - 1.0) <= 1e-12);
      CHECK(f(p.low()) == doctest::Approx(0.0));
      CHECK(f(0.5 * (p.low() + p.high())) == doctest::Approx(2.0 / p.width()).epsilon(1e-12));
    }
  }
}

TEST_CASE("sample_initial: uniform rejection from the admissible square") {
  SUBCASE("gamma = 0: mean width 1/3") {
    Rng rng(2024);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += sample_initial(rng, 0.0).first.width();
    CHECK(std::abs(acc / n - 1.0 / 3.0) < 0.01);
  }
  SUBCASE("gamma = 1/3: rejection predicate holds") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i)
      CHECK(sample_initial(rng, 1.0 / 3.0).first.width() >= 1.0 / 3.0);
  }
  SUBCASE("gamma = 1/3: corner strip probability matches the area ratio") {
    // P(min(y,z) <= eps) = 1 - (1-eps-gamma)^2/(1-gamma)^2 on the admissible set
    const double gamma = 1.0 / 3.0, eps = 0.05;
    const double p_exact =
        1.0 - (1.0 - eps - gamma) * (1.0 - eps - gamma) / ((1.0 - gamma) * (1.0 - gamma));
    Rng rng(99);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
      if (sample_initial(rng, gamma).first.low() <= eps) ++hits;
    CHECK(std::abs(static_cast<double>(hits) / n - p_exact) < 0.005);
  }
  SUBCASE("deterministic stream") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
      const auto pa = sample_initial(a, 0.2).first;
      const auto pb = sample_initial(b, 0.2).first;
      CHECK(pa.y == pb.y);
      CHECK(pa.z == pb.z);
    }
  }
  SUBCASE("parameter error") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_initial(rng, 1.0), std::invalid_argument);
  }
}

TEST_CASE("phi: closed form of the unrestricted intensity") {
  CHECK(phi(0.0) == 0.0);
  CHECK(phi(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(phi(0.5) == doctest::Approx(8.0 * std::log(2.0) - 4.0).epsilon(1e-14));
  for (int i = 0; i <= 500; ++i) {
    const double x = i / 1000.0;
    CHECK(phi(x) == doctest::Approx(phi(1.0 - x)).epsilon(1e-12));
  }
  const auto q = adaptive_quad([](double x) { return phi(x); }, 0.0, 1.0, {0.5}, 1e-9);
  CHECK(q.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("phi_gamma: regime dispatch") {
  SUBCASE("gamma = 1/3 spot values") {
    CHECK(phi_gamma(1.0 / 3.0, 0.5) ==
          doctest::Approx(18.0 * std::log(2.0) - 10.5).epsilon(1e-14));
    CHECK(phi_gamma(1.0 / 3.0, 0.0) == 0.0);
    CHECK(phi_gamma(1.0 / 3.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("agrees with the six-branch display to 1e-12") {
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      CHECK(std::abs(phi_gamma(1.0 / 3.0, x) - phi_third_sixbranch(x)) <= 1e-12);
    }
    for (double x : {1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0})
      CHECK(std::abs(phi_gamma(1.0 / 3.0, x) - phi_third_sixbranch(x)) <= 1e-12);
  }
  SUBCASE("continuous across every regime boundary") {
    for (double g : {0.05, 1.0 / 3.0, 0.6, 0.9}) {
      for (double b : {0.5 * g, g, 1.0 - g, 0.5, 1.0 - 0.5 * g, 0.5 * (1.0 + g)}) {
        if (b <= 0.0 || b >= 1.0) continue;
        const double h = 1e-12;
        const double lo = std::max(0.0, b - h), hi = std::min(1.0, b + h);
        CHECK(std::abs(phi_gamma(g, lo) - phi_gamma(g, hi)) <= 1e-9);
      }
    }
  }
  SUBCASE("strictly increasing on [0,1/2], symmetric about 1/2") {
    for (double g : {0.05, 1.0 / 3.0, 0.6, 0.9}) {
      double prev = phi_gamma(g, 0.0);
      for (int i = 1; i <= 10000; ++i) {
        const double x = 0.5 * i / 10000.0;
        const double cur = phi_gamma(g, x);
        CHECK(cur > prev);
        prev = cur;
      }
      // exact at dyadic points (1-x representable), to 1e-12 elsewhere
      for (double x : {0.25, 0.375, 0.4375})
        CHECK(phi_gamma(g, x) == phi_gamma(g, 1.0 - x));
      for (double x : {0.05, 0.21, 0.4, 0.49})
        CHECK(phi_gamma(g, x) == doctest::Approx(phi_gamma(g, 1.0 - x)).epsilon(1e-12));
    }
  }
  SUBCASE("gamma -> 0 recovers phi") {
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      CHECK(std::abs(phi_gamma(1e-4, x) - phi(x)) <= 1e-3);
    }
  }
  SUBCASE("parameter errors") {
    CHECK_THROWS_AS(phi_gamma(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(phi_gamma(1.0, 0.5), std::invalid_argument);
  }
}

TEST_CASE("coordinate perturbations move TV by at most 2 delta / gamma") {
  const double gamma = 1.0 / 3.0, delta = 0.05;
  Rng rng(31);
  int tested = 0;
  while (tested < 200) {
    const auto p1 = sample_initial(rng, gamma).first;
    TriangularParams p2{p1.y + rng.uniform(-delta, delta), p1.z + rng.uniform(-delta, delta)};
    p2.y = std::min(1.0, std::max(0.0, p2.y));
    p2.z = std::min(1.0, std::max(0.0, p2.z));
    if (p2.width() < gamma) continue;
    const double tv = tv_distance(triangular_density(p1), triangular_density(p2));
    CHECK(tv <= 2.0 * delta / gamma + 1e-12);
    ++tested;
  }
}

TEST_CASE("intensity_plf: tabulation quality") {
  SUBCASE("gamma = 1/3, n = 1024: integral within 1e-6") {
    const auto f = intensity_plf(1.0 / 3.0, 1024);
    CHECK(std::abs(f.integral() - 1.0) <= 1e-6);
  }
  SUBCASE("gamma = 0, n = 1024: sup gap below 1e-5 on a dense grid") {
    const auto f = intensity_plf(0.0, 1024);
    double worst = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double x = i / 100000.0;
      worst = std::max(worst, std::abs(f(x) - phi(x)));
    }
    CHECK(worst < 1e-5);
  }
  SUBCASE("second-order convergence: doubling n shrinks the gap ~4x") {
    auto sup_gap = [](int n) {
      const auto f = intensity_plf(1.0 / 3.0, n);
      double worst = 0.0;
      for (int i = 0; i <= 20000; ++i) {
        const double x = i / 20000.0;
        worst = std::max(worst, std::abs(f(x) - phi_gamma(1.0 / 3.0, x)));
      }
      return worst;
    };
    const double ratio = sup_gap(64) / sup_gap(128);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
  SUBCASE("n too small") { CHECK_THROWS_AS(intensity_plf(0.0, 8), std::invalid_argument); }
  SUBCASE("intensity_density passes the strict gate") {
    CHECK(intensity_density(1.0 / 3.0).is_density());
    CHECK(intensity_density(0.0).is_density());
  }
}

TEST_CASE("monte_carlo_intensity: empirical oracle") {
  SUBCASE("single sample returned verbatim") {
    Rng a(55), b(55);
    const auto mc = monte_carlo_intensity(a, 0.2, 1, 1000);
    const auto direct = sample_initial(b, 0.2).second;
    REQUIRE(mc.size() == direct.size());
    for (std::size_t i = 0; i < mc.size(); ++i) {
      CHECK(mc.breakpoints()[i] == direct.breakpoints()[i]);
      CHECK(mc.values()[i] == direct.values()[i]);
    }
  }
  SUBCASE("gamma = 1/3: close to the closed form already at 2e4 samples") {
    Rng rng(8);
    const auto mc = monte_carlo_intensity(rng, 1.0 / 3.0, 20000, 1000);
    double worst = 0.0;
    for (std::size_t i = 0; i < mc.size(); ++i)
      worst = std::max(worst,
                       std::abs(mc.values()[i] - phi_gamma(1.0 / 3.0, mc.breakpoints()[i])));
    CHECK(worst < 0.05);
  }
  SUBCASE("parameter errors") {
    Rng rng(1);
    CHECK_THROWS_AS(monte_carlo_intensity(rng, 0.0, 0, 100), std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_intensity(rng, 0.0, 10, 1), std::invalid_argument);
  }
}

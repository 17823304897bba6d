#include "mvd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mvd {

namespace {

constexpr double kLevyGateTol = 1e-9;

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SimConfig: ") + field + " " + what);
}

}  // namespace

void SimConfig::validate() const {
  require(theta >= 0.0 && theta <= 1.0, "theta", "must lie in [0,1]");
  require(mu > 0.0 && mu <= 0.5, "mu", "must lie in (0, 1/2]");
  require(gamma >= 0.0 && gamma < 1.0, "gamma", "must lie in [0,1)");
  require(n_sites >= 1, "n_sites", "must be >= 1");
  require(horizon > 0.0, "horizon", "must be > 0");
  require(simplify_tol >= 0.0, "simplify_tol", "must be >= 0");
}

int edge_count(int n_sites, Boundary b) {
  if (n_sites <= 1) return 0;
  if (b == Boundary::path || n_sites == 2) return n_sites - 1;
  return n_sites;
}

std::pair<int, int> edge_sites(int edge, int n_sites, Boundary b) {
  if (b == Boundary::ring && n_sites >= 3 && edge == n_sites - 1) return {n_sites - 1, 0};
  return {edge, edge + 1};
}

double opinion_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, Metric metric) {
  return metric == Metric::total_variation ? tv_distance(f, g) : levy_distance(f, g, kLevyGateTol);
}

double edge_distance(const LatticeState& st, const SimConfig& cfg, int edge) {
  if (st.dist_valid[static_cast<std::size_t>(edge)])
    return st.dist_cache[static_cast<std::size_t>(edge)];
  const auto [u, v] = edge_sites(edge, cfg.n_sites, cfg.boundary);
  const double d = opinion_distance(st.opinions[static_cast<std::size_t>(u)],
                                    st.opinions[static_cast<std::size_t>(v)], cfg.metric);
  st.dist_cache[static_cast<std::size_t>(edge)] = d;
  st.dist_valid[static_cast<std::size_t>(edge)] = 1;
  return d;
}

LatticeState init(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  LatticeState st;
  st.opinions.reserve(static_cast<std::size_t>(cfg.n_sites));
  for (int v = 0; v < cfg.n_sites; ++v)
    st.opinions.push_back(sample_initial(rng, cfg.gamma).second);
  const std::size_t e = static_cast<std::size_t>(edge_count(cfg.n_sites, cfg.boundary));
  st.cumulative_energy_loss.assign(e, 0.0);
  st.event_counts.assign(e, 0);
  st.performed_counts.assign(e, 0);
  st.first_event_time.assign(e, std::numeric_limits<double>::infinity());
  st.last_event_time.assign(e, -std::numeric_limits<double>::infinity());
  st.dist_cache.assign(e, 0.0);
  st.dist_valid.assign(e, 0);
  return st;
}

namespace {

void invalidate_incident(LatticeState& st, const SimConfig& cfg, int edge) {
  const int e = edge_count(cfg.n_sites, cfg.boundary);
  auto drop = [&](int k) {
    if (cfg.boundary == Boundary::ring && cfg.n_sites >= 3)
      k = (k % e + e) % e;
    else if (k < 0 || k >= e)
      return;
    st.dist_valid[static_cast<std::size_t>(k)] = 0;
  };
  drop(edge - 1);
  drop(edge);
  drop(edge + 1);
}

}  // namespace

void run(LatticeState& st, const SimConfig& cfg, double until, Rng& rng,
         const EventObserver& observer) {
  cfg.validate();
  if (until < st.time) throw std::invalid_argument("run: until must be >= state.time");
  const int e_count = edge_count(cfg.n_sites, cfg.boundary);
  if (e_count == 0) {
    st.time = until;
    return;
  }
  const double loss_factor = 2.0 * cfg.mu * (1.0 - cfg.mu);
  for (;;) {
    const double t_next = st.time + rng.exponential(static_cast<double>(e_count));
    if (t_next > until) {
      st.time = until;
      return;
    }
    st.time = t_next;
    const int edge = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(e_count)));
    auto ei = static_cast<std::size_t>(edge);
    ++st.event_counts[ei];
    if (st.event_counts[ei] == 1) st.first_event_time[ei] = t_next;
    st.last_event_time[ei] = t_next;

    const double dist = edge_distance(st, cfg, edge);
    const bool performed = dist <= cfg.theta;
    if (performed) {
      const auto [u, v] = edge_sites(edge, cfg.n_sites, cfg.boundary);
      PiecewiseLinearFn& fu = st.opinions[static_cast<std::size_t>(u)];
      PiecewiseLinearFn& fv = st.opinions[static_cast<std::size_t>(v)];
      st.cumulative_energy_loss[ei] += loss_factor * l2_distance_sq(fu, fv);
      auto [h1, h2] = mix_pair(fu, fv, cfg.mu);
      fu = simplify(h1, cfg.simplify_tol);
      fv = simplify(h2, cfg.simplify_tol);
      ++st.performed_counts[ei];
      invalidate_incident(st, cfg, edge);
    }
    if (cfg.retain_event_log) st.event_log.push_back(EventRecord{t_next, edge, performed});
    if (observer) observer(st, edge, performed, dist);
  }
}

std::vector<int> blocked_edges(const LatticeState& st, const SimConfig& cfg, double theta) {
  std::vector<int> out;
  const int e_count = edge_count(cfg.n_sites, cfg.boundary);
  for (int e = 0; e < e_count; ++e)
    if (edge_distance(st, cfg, e) > theta) out.push_back(e);
  return out;
}

Diagnostics diagnostics(const LatticeState& st, const SimConfig& cfg,
                        const PiecewiseLinearFn& intensity) {
  Diagnostics d;
  const int e_count = edge_count(cfg.n_sites, cfg.boundary);
  int blocked = 0;
  for (int e = 0; e < e_count; ++e) {
    const double dist = edge_distance(st, cfg, e);
    d.max_neighbor_tv = std::max(d.max_neighbor_tv, dist);
    if (dist > cfg.theta) ++blocked;
  }
  d.blocked_edge_fraction = e_count > 0 ? static_cast<double>(blocked) / e_count : 0.0;
  double tv_acc = 0.0, energy = 0.0;
  for (const auto& f : st.opinions) {
    tv_acc += tv_distance(f, intensity);
    energy += l2_energy(f);
  }
  d.mean_tv_to_intensity = tv_acc / static_cast<double>(st.opinions.size());
  d.energy_total = energy;
  return d;
}

FlatnessFlags flatness_scan(const std::vector<PiecewiseLinearFn>& initial, double delta,
                            double eps, double reference) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("flatness_scan: delta must lie in [0,1]");
  if (!(eps >= 0.0)) throw std::invalid_argument("flatness_scan: eps must be >= 0");
  const std::size_t n = initial.size();
  // With T(j) = sum_{u<j} s_u - j*reference, the window condition
  // |T(b) - T(a)| <= eps (b - a) splits into monotone comparisons of
  // P(j) = T(j) - eps*j and Q(j) = T(j) + eps*j:
  //   T(b)-T(a) <= eps(b-a)  <=>  P(b) <= P(a),
  //   T(a)-T(b) <= eps(b-a)  <=>  Q(a) <= Q(b),
  // so each flag reduces to prefix/suffix extrema of P and Q.
  std::vector<double> P(n + 1), Q(n + 1);
  double acc = 0.0;
  P[0] = 0.0;
  Q[0] = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    acc += initial[v].cdf(delta) - reference;
    P[v + 1] = acc - eps * static_cast<double>(v + 1);
    Q[v + 1] = acc + eps * static_cast<double>(v + 1);
  }
  const double ninf = -std::numeric_limits<double>::infinity();
  const double pinf = std::numeric_limits<double>::infinity();
  std::vector<double> sufmaxP(n + 2, ninf), sufminQ(n + 2, pinf);
  for (std::size_t j = n + 1; j-- > 0;) {
    sufmaxP[j] = std::max(P[j], sufmaxP[j + 1]);
    sufminQ[j] = std::min(Q[j], sufminQ[j + 1]);
  }
  std::vector<double> preminP(n + 1), premaxQ(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    preminP[j] = j == 0 ? P[0] : std::min(preminP[j - 1], P[j]);
    premaxQ[j] = j == 0 ? Q[0] : std::max(premaxQ[j - 1], Q[j]);
  }

  FlatnessFlags flags;
  flags.left.assign(n, 0);
  flags.right.assign(n, 0);
  flags.two_sided.assign(n, 0);
  constexpr double slack = 1e-12;
  for (std::size_t v = 0; v < n; ++v) {
    // right: windows [v, b) for b > v
    flags.right[v] =
        (sufmaxP[v + 1] <= P[v] + slack && Q[v] <= sufminQ[v + 1] + slack) ? 1 : 0;
    // left: windows [a, v+1) for a <= v
    flags.left[v] =
        (P[v + 1] <= preminP[v] + slack && premaxQ[v] <= Q[v + 1] + slack) ? 1 : 0;
    // two-sided: windows [a, b) with a <= v < b
    flags.two_sided[v] = (sufmaxP[v + 1] <= preminP[v] + slack &&
                          premaxQ[v] <= sufminQ[v + 1] + slack)
                             ? 1
                             : 0;
  }
  return flags;
}

std::vector<long> quiet_edge_gaps(const LatticeState& st, const SimConfig& cfg, double t) {
  if (t > st.time) throw std::invalid_argument("quiet_edge_gaps: t exceeds simulated time");
  const int e_count = edge_count(cfg.n_sites, cfg.boundary);
  std::vector<long> quiet;
  for (int e = 0; e < e_count; ++e)
    if (st.first_event_time[static_cast<std::size_t>(e)] > t) quiet.push_back(e);
  std::vector<long> gaps;
  if (quiet.size() < 2) return gaps;
  gaps.reserve(quiet.size());
  for (std::size_t i = 0; i + 1 < quiet.size(); ++i) gaps.push_back(quiet[i + 1] - quiet[i]);
  if (cfg.boundary == Boundary::ring && cfg.n_sites >= 3)
    gaps.push_back(e_count - quiet.back() + quiet.front());
  return gaps;
}

}  // namespace mvd

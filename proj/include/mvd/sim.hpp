#ifndef MVD_SIM_HPP
#define MVD_SIM_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "mvd/opinions.hpp"
#include "mvd/plf.hpp"
#include "mvd/rng.hpp"

namespace mvd {

enum class Boundary { ring, path };
enum class Metric { total_variation, levy };

struct SimConfig {
  double theta = 0.5;       // confidence bound, metric units
  double mu = 0.5;          // convergence parameter, (0, 1/2]
  double gamma = 0.0;       // minimal initial support width, [0,1)
  int n_sites = 1000;
  double horizon = 1000.0;  // unit-rate Poisson clock time
  Boundary boundary = Boundary::ring;
  Metric metric = Metric::total_variation;
  std::uint64_t seed = 1;
  double simplify_tol = kDefaultSimplifyTol;
  bool retain_event_log = false;

  void validate() const;  // throws std::invalid_argument naming the field
};

/// The ring with 1 or 2 sites degenerates to 0 resp. 1 edge (no parallel edges).
int edge_count(int n_sites, Boundary b);
std::pair<int, int> edge_sites(int edge, int n_sites, Boundary b);

struct EventRecord {
  double time;
  int edge;
  bool performed;
};

struct LatticeState {
  double time = 0.0;
  std::vector<PiecewiseLinearFn> opinions;       // one density per site
  std::vector<double> cumulative_energy_loss;    // per edge, nondecreasing
  std::vector<long> event_counts;                // per edge, all Poisson events
  std::vector<long> performed_counts;            // per edge, gate passed
  std::vector<double> first_event_time;          // per edge, +inf if quiet
  std::vector<double> last_event_time;           // per edge, -inf if quiet
  std::vector<EventRecord> event_log;            // only with retain_event_log

  // Per-edge metric distance cache; entries are invalidated whenever an
  // incident opinion changes.
  mutable std::vector<double> dist_cache;
  mutable std::vector<char> dist_valid;
};

/// Metric distance between two opinions under the configured metric.
double opinion_distance(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g, Metric metric);

/// Cached metric distance across one edge.
double edge_distance(const LatticeState& st, const SimConfig& cfg, int edge);

/// Fresh lattice with i.i.d. gamma-restricted triangular opinions.
LatticeState init(const SimConfig& cfg, Rng& rng);

/// Called after every Poisson event (post-update state).
using EventObserver =
    std::function<void(const LatticeState&, int edge, bool performed, double distance)>;

/// Advances the state to `until`: the superposition of unit-rate clocks is
/// simulated by Exponential(|E|) inter-event times and a uniform edge per
/// event; an event performs the mix update iff the metric distance is <= theta,
/// crediting 2 mu (1-mu) int (f-g)^2 to the edge's energy ledger and applying
/// simplify to both updated opinions.
void run(LatticeState& st, const SimConfig& cfg, double until, Rng& rng,
         const EventObserver& observer = {});

/// Edges with current metric distance strictly greater than theta.
std::vector<int> blocked_edges(const LatticeState& st, const SimConfig& cfg, double theta);

struct Diagnostics {
  double max_neighbor_tv = 0.0;          // max metric distance over edges
  double blocked_edge_fraction = 0.0;    // at cfg.theta
  double mean_tv_to_intensity = 0.0;     // always total variation
  double energy_total = 0.0;             // sum of per-site L2 energies
};

Diagnostics diagnostics(const LatticeState& st, const SimConfig& cfg,
                        const PiecewiseLinearFn& intensity);

/// Per-site epsilon-flatness flags of the scalarized configuration
/// s_v = cdf(f_v, delta) against the supplied reference mean. A site is
/// right-flat iff every prefix average over [v, v+n] stays within eps of the
/// reference for all n up to the window edge; left and two-sided analogously.
/// Flags are window-truncated approximations of the infinite-path notion.
struct FlatnessFlags {
  std::vector<char> left, right, two_sided;
};

FlatnessFlags flatness_scan(const std::vector<PiecewiseLinearFn>& initial, double delta,
                            double eps, double reference);

/// Lengths of the index gaps between consecutive edges with zero Poisson
/// events in [0, t] (cyclic on the ring). Requires t <= st.time.
std::vector<long> quiet_edge_gaps(const LatticeState& st, const SimConfig& cfg, double t);

/// Convenience bundle owning config, stream and state.
struct Simulation {
  SimConfig config;
  Rng rng;
  LatticeState state;

  explicit Simulation(const SimConfig& cfg) : config(cfg), rng(cfg.seed), state(init(cfg, rng)) {}
  void run_until(double t, const EventObserver& obs = {}) { run(state, config, t, rng, obs); }
};

}  // namespace mvd

#endif

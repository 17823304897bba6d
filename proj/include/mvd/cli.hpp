#ifndef MVD_CLI_HPP
#define MVD_CLI_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvd/sim.hpp"

namespace mvd {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when --help was requested; the help text is in what().
struct HelpRequest : UsageError {
  using UsageError::UsageError;
};

struct ExperimentSpec {
  enum class Command { theta_c, intensity, simulate, sweep, sad };

  Command command = Command::simulate;
  SimConfig sim;

  double tol = 1e-8;        // theta-c quadrature tolerance
  int intensity_n = 1024;   // intensity tabulation points per regime

  std::vector<double> thetas;  // sweep grid (sorted ascending)
  int replicates = 1;
  int parallelism = 0;  // 0 -> hardware concurrency

  int sad_d = 1;
  double sad_mu = 0.5;
  int sad_max_updates = 8;

  double sample_interval = 10.0;  // simulate: time-series sampling step
  bool dump_final = false;        // simulate: per-site PLF dump

  std::string output_dir = ".";
  std::string output_prefix = "mvd";
};

/// Parses subcommand + flags (also honoring a key=value config file given via
/// --config, with command-line values winning). Throws UsageError with a
/// message naming the offending flag.
ExperimentSpec parse_args(const std::vector<std::string>& args);

/// One simulation cell: runs to the horizon, measuring which edges stay
/// blocked through the entire final half of the run (the finite-horizon
/// stand-in for "finally blocked").
struct RunOutcome {
  Diagnostics diag;
  double persistent_blocked = 0.0;
};
RunOutcome run_cell(const SimConfig& cfg, const PiecewiseLinearFn& intensity);

struct SweepCell {
  double theta = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  Diagnostics diag;
  double persistent_blocked = 0.0;
};

struct ThetaSummary {
  double theta = 0.0;
  double median_blocked_fraction = 0.0;
  double median_persistent_blocked = 0.0;
  double median_max_neighbor_tv = 0.0;
  double median_mean_tv_to_intensity = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered by (theta index, replicate)
  std::vector<ThetaSummary> summary;
};

/// Runs the full (theta x replicate) grid, cells in parallel up to the
/// configured limit; cell seeds are spec.sim.seed + theta_index*replicates +
/// replicate, so any single cell can be reproduced in isolation.
SweepResult run_sweep(const ExperimentSpec& spec);

std::string sweep_csv(const SweepResult& r);
std::string sweep_json(const ExperimentSpec& spec, const SweepResult& r);

/// Time-series CSV (t,max_neighbor_tv,blocked_fraction,mean_tv_to_intensity,
/// energy_total) sampled every spec.sample_interval; optionally hands out the
/// final opinions.
std::string run_timeseries(const ExperimentSpec& spec,
                           std::vector<PiecewiseLinearFn>* final_opinions = nullptr);

/// Full CLI entry point: 0 on success, 1 on usage errors, 2 on runtime errors.
int run_cli(int argc, const char* const* argv);

}  // namespace mvd

#endif

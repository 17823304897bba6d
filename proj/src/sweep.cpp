#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mvd/cli.hpp"

namespace mvd {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunOutcome run_cell(const SimConfig& cfg, const PiecewiseLinearFn& intensity) {
  Simulation sim(cfg);
  const int e_count = edge_count(cfg.n_sites, cfg.boundary);
  sim.run_until(0.5 * cfg.horizon);

  // Edges blocked at half-horizon; an entry is cleared as soon as the edge's
  // distance drops to <= theta at any event that touches it, so survivors
  // were blocked throughout the final half of the run.
  std::vector<char> persistent(static_cast<std::size_t>(e_count), 0);
  for (int e = 0; e < e_count; ++e)
    persistent[static_cast<std::size_t>(e)] =
        edge_distance(sim.state, cfg, e) > cfg.theta ? 1 : 0;

  auto observer = [&](const LatticeState& st, int edge, bool performed, double) {
    if (!performed) return;
    for (int k = edge - 1; k <= edge + 1; ++k) {
      int e = k;
      if (cfg.boundary == Boundary::ring && cfg.n_sites >= 3)
        e = (k % e_count + e_count) % e_count;
      else if (k < 0 || k >= e_count)
        continue;
      if (persistent[static_cast<std::size_t>(e)] &&
          edge_distance(st, cfg, e) <= cfg.theta)
        persistent[static_cast<std::size_t>(e)] = 0;
    }
  };
  sim.run_until(cfg.horizon, observer);

  RunOutcome out;
  out.diag = diagnostics(sim.state, cfg, intensity);
  long blocked = 0;
  for (char c : persistent) blocked += c;
  out.persistent_blocked = e_count > 0 ? static_cast<double>(blocked) / e_count : 0.0;
  return out;
}

SweepResult run_sweep(const ExperimentSpec& spec) {
  if (spec.thetas.empty()) throw UsageError("sweep: empty theta grid (--thetas)");
  if (spec.replicates < 1) throw UsageError("sweep: --replicates must be >= 1");
  spec.sim.validate();

  const PiecewiseLinearFn intensity = intensity_density(spec.sim.gamma);
  const std::size_t n_cells = spec.thetas.size() * static_cast<std::size_t>(spec.replicates);

  SweepResult result;
  result.cells.resize(n_cells);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_cells) return;
      try {
        const std::size_t ti = i / static_cast<std::size_t>(spec.replicates);
        const int rep = static_cast<int>(i % static_cast<std::size_t>(spec.replicates));
        SimConfig cfg = spec.sim;
        cfg.theta = spec.thetas[ti];
        cfg.seed = spec.sim.seed + i;
        RunOutcome out = run_cell(cfg, intensity);
        result.cells[i] =
            SweepCell{cfg.theta, rep, cfg.seed, out.diag, out.persistent_blocked};
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n_cells);
        return;
      }
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 2;
  const unsigned jobs = std::min<std::size_t>(
      n_cells, spec.parallelism > 0 ? static_cast<unsigned>(spec.parallelism) : hw);
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (std::size_t ti = 0; ti < spec.thetas.size(); ++ti) {
    std::vector<double> bf, pb, mx, mi;
    for (int r = 0; r < spec.replicates; ++r) {
      const SweepCell& c = result.cells[ti * spec.replicates + r];
      bf.push_back(c.diag.blocked_edge_fraction);
      pb.push_back(c.persistent_blocked);
      mx.push_back(c.diag.max_neighbor_tv);
      mi.push_back(c.diag.mean_tv_to_intensity);
    }
    result.summary.push_back(ThetaSummary{spec.thetas[ti], median(bf), median(pb), median(mx),
                                          median(mi)});
  }
  return result;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "theta,replicate,blocked_fraction,max_neighbor_tv,mean_tv_to_intensity,persistent_blocked\n";
  for (const SweepCell& c : r.cells)
    os << fmt17(c.theta) << ',' << c.replicate << ',' << fmt17(c.diag.blocked_edge_fraction)
       << ',' << fmt17(c.diag.max_neighbor_tv) << ',' << fmt17(c.diag.mean_tv_to_intensity)
       << ',' << fmt17(c.persistent_blocked) << '\n';
  return os.str();
}

std::string sweep_json(const ExperimentSpec& spec, const SweepResult& r) {
  nlohmann::json j;
  j["gamma"] = spec.sim.gamma;
  j["mu"] = spec.sim.mu;
  j["n_sites"] = spec.sim.n_sites;
  j["horizon"] = spec.sim.horizon;
  j["replicates"] = spec.replicates;
  j["base_seed"] = spec.sim.seed;
  j["per_theta"] = nlohmann::json::array();
  for (const ThetaSummary& s : r.summary) {
    j["per_theta"].push_back({{"theta", s.theta},
                              {"median_blocked_fraction", s.median_blocked_fraction},
                              {"median_persistent_blocked", s.median_persistent_blocked},
                              {"median_max_neighbor_tv", s.median_max_neighbor_tv},
                              {"median_mean_tv_to_intensity", s.median_mean_tv_to_intensity}});
  }
  return j.dump(2) + "\n";
}

std::string run_timeseries(const ExperimentSpec& spec,
                           std::vector<PiecewiseLinearFn>* final_opinions) {
  spec.sim.validate();
  if (!(spec.sample_interval > 0.0)) throw UsageError("simulate: --interval must be > 0");
  const PiecewiseLinearFn intensity = intensity_density(spec.sim.gamma);
  Simulation sim(spec.sim);
  std::ostringstream os;
  os << "t,max_neighbor_tv,blocked_fraction,mean_tv_to_intensity,energy_total\n";
  auto row = [&] {
    const Diagnostics d = diagnostics(sim.state, spec.sim, intensity);
    os << fmt17(sim.state.time) << ',' << fmt17(d.max_neighbor_tv) << ','
       << fmt17(d.blocked_edge_fraction) << ',' << fmt17(d.mean_tv_to_intensity) << ','
       << fmt17(d.energy_total) << '\n';
  };
  row();
  for (double t = spec.sample_interval; t < spec.sim.horizon; t += spec.sample_interval) {
    sim.run_until(t);
    row();
  }
  sim.run_until(spec.sim.horizon);
  row();
  if (final_opinions) *final_opinions = sim.state.opinions;
  return os.str();
}

}  // namespace mvd

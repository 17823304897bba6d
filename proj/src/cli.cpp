#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvd/cli.hpp"
#include "mvd/sad.hpp"
#include "mvd/threshold.hpp"

namespace mvd {

namespace {

void add_sim_flags(CLI::App* sub, SimConfig& sim, bool with_theta) {
  if (with_theta) sub->add_option("--theta", sim.theta, "confidence bound in [0,1]");
  sub->add_option("--mu", sim.mu, "convergence parameter in (0,1/2]")->capture_default_str();
  sub->add_option("--gamma", sim.gamma, "minimal initial support width in [0,1)")
      ->capture_default_str();
  sub->add_option("--n-sites", sim.n_sites, "window size")->capture_default_str();
  sub->add_option("--horizon", sim.horizon, "simulated time")->capture_default_str();
  std::map<std::string, Boundary> bmap{{"ring", Boundary::ring}, {"path", Boundary::path}};
  sub->add_option("--boundary", sim.boundary, "window boundary")
      ->transform(CLI::CheckedTransformer(bmap, CLI::ignore_case))
      ->default_str("ring");
  std::map<std::string, Metric> mmap{{"total_variation", Metric::total_variation},
                                     {"tv", Metric::total_variation},
                                     {"levy", Metric::levy}};
  sub->add_option("--metric", sim.metric, "opinion distance")
      ->transform(CLI::CheckedTransformer(mmap, CLI::ignore_case))
      ->default_str("total_variation");
  sub->add_option("--seed", sim.seed, "base RNG seed")->capture_default_str();
  sub->add_option("--simplify-tol", sim.simplify_tol, "breakpoint pruning tolerance")
      ->capture_default_str();
}

void add_output_flags(CLI::App* sub, ExperimentSpec& spec) {
  sub->add_option("--output-dir", spec.output_dir, "directory for emitted files")
      ->envname("MVD_OUTPUT_DIR")
      ->capture_default_str();
  sub->add_option("--prefix", spec.output_prefix, "output file prefix")->capture_default_str();
}

std::string out_path(const ExperimentSpec& spec, const std::string& suffix) {
  return (std::filesystem::path(spec.output_dir) / (spec.output_prefix + suffix)).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << content;
}

}  // namespace

ExperimentSpec parse_args(const std::vector<std::string>& args) {
  ExperimentSpec spec;
  CLI::App app{"measure-valued Deffuant dynamics on a finite window of Z"};
  app.require_subcommand(1);

  auto* tc = app.add_subcommand("theta-c", "consensus threshold for a given gamma");
  double tc_gamma = 1.0 / 3.0;
  tc->add_option("--gamma", tc_gamma, "support-width floor in (0,1)")->required();
  tc->add_option("--tol", spec.tol, "quadrature tolerance")->capture_default_str();
  tc->set_config("--config");

  auto* in = app.add_subcommand("intensity", "tabulate the intensity density as CSV");
  double in_gamma = 0.0;
  in->add_option("--gamma", in_gamma, "support-width floor in [0,1)")->capture_default_str();
  in->add_option("--n", spec.intensity_n, "subdivision points per regime")
      ->capture_default_str();
  add_output_flags(in, spec);
  in->set_config("--config");

  auto* si = app.add_subcommand("simulate", "single run with time-series output");
  spec.sim.theta = std::numeric_limits<double>::quiet_NaN();  // must be given explicitly
  add_sim_flags(si, spec.sim, true);
  si->add_option("--interval", spec.sample_interval, "diagnostics sampling step")
      ->capture_default_str();
  si->add_flag("--dump-final", spec.dump_final, "write per-site final opinions");
  add_output_flags(si, spec);
  si->set_config("--config");

  auto* sw = app.add_subcommand("sweep", "replicated runs over a theta grid");
  add_sim_flags(sw, spec.sim, false);
  sw->add_option("--thetas", spec.thetas, "comma-separated theta grid")
      ->required()
      ->delimiter(',');
  sw->add_option("--replicates", spec.replicates, "independent runs per theta")
      ->capture_default_str();
  sw->add_option("--jobs", spec.parallelism, "max concurrent runs (0 = all cores)")
      ->capture_default_str();
  add_output_flags(sw, spec);
  sw->set_config("--config");

  auto* sa = app.add_subcommand("sad", "search the max weight reachable at distance d");
  sa->add_option("--d", spec.sad_d, "graph distance")->required();
  sa->add_option("--mu", spec.sad_mu, "convergence parameter in (0,1/2]")
      ->capture_default_str();
  sa->add_option("--max-updates", spec.sad_max_updates, "update sequence length cap")
      ->required();
  sa->set_config("--config");

  std::vector<char*> argv;
  std::string prog = "mvd";
  argv.push_back(prog.data());
  std::vector<std::string> storage = args;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os;
    os << app.help();
    throw HelpRequest(os.str());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  try {
    if (tc->parsed()) {
      spec.command = ExperimentSpec::Command::theta_c;
      spec.sim.gamma = tc_gamma;
      if (!(tc_gamma > 0.0 && tc_gamma < 1.0)) throw UsageError("--gamma must lie in (0,1)");
      if (!(spec.tol > 0.0)) throw UsageError("--tol must be > 0");
    } else if (in->parsed()) {
      spec.command = ExperimentSpec::Command::intensity;
      spec.sim.gamma = in_gamma;
      if (!(in_gamma >= 0.0 && in_gamma < 1.0)) throw UsageError("--gamma must lie in [0,1)");
      if (spec.intensity_n < 16) throw UsageError("--n must be >= 16");
    } else if (si->parsed()) {
      spec.command = ExperimentSpec::Command::simulate;
      if (std::isnan(spec.sim.theta)) throw UsageError("simulate: --theta is required");
      spec.sim.validate();
    } else if (sw->parsed()) {
      spec.command = ExperimentSpec::Command::sweep;
      std::sort(spec.thetas.begin(), spec.thetas.end());
      for (double t : spec.thetas)
        if (!(t >= 0.0 && t <= 1.0)) throw UsageError("--thetas entries must lie in [0,1]");
      if (spec.replicates < 1) throw UsageError("--replicates must be >= 1");
      spec.sim.theta = spec.thetas.front();
      spec.sim.validate();
    } else if (sa->parsed()) {
      spec.command = ExperimentSpec::Command::sad;
      if (spec.sad_d < 1) throw UsageError("--d must be >= 1");
      if (!(spec.sad_mu > 0.0 && spec.sad_mu <= 0.5))
        throw UsageError("--mu must lie in (0,1/2]");
      if (spec.sad_max_updates < 1) throw UsageError("--max-updates must be >= 1");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int dispatch(const ExperimentSpec& spec) {
  switch (spec.command) {
    case ExperimentSpec::Command::theta_c: {
      QuadratureResult q = theta_c_quad(spec.sim.gamma, spec.tol);
      nlohmann::json j{{"gamma", spec.sim.gamma},
                       {"theta_c", q.value},
                       {"error_estimate", q.error_estimate},
                       {"evaluations", q.evaluations}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    case ExperimentSpec::Command::intensity: {
      PiecewiseLinearFn f = intensity_plf(spec.sim.gamma, spec.intensity_n);
      std::ostringstream os;
      os << "x,phi\n";
      for (std::size_t i = 0; i < f.size(); ++i)
        os << fmt17(f.breakpoints()[i]) << ',' << fmt17(f.values()[i]) << '\n';
      const std::string path = out_path(spec, "_intensity.csv");
      write_file(path, os.str());
      std::cout << path << "\n";
      return 0;
    }
    case ExperimentSpec::Command::simulate: {
      std::vector<PiecewiseLinearFn> finals;
      const std::string csv = run_timeseries(spec, spec.dump_final ? &finals : nullptr);
      const std::string path = out_path(spec, "_timeseries.csv");
      write_file(path, csv);
      std::cout << path << "\n";
      if (spec.dump_final) {
        for (std::size_t v = 0; v < finals.size(); ++v) {
          std::ostringstream os;
          write_csv(os, finals[v]);
          write_file(out_path(spec, "_site" + std::to_string(v) + ".csv"), os.str());
        }
        std::cout << out_path(spec, "_site<k>.csv") << "\n";
      }
      return 0;
    }
    case ExperimentSpec::Command::sweep: {
      SweepResult r = run_sweep(spec);
      const std::string csv_path = out_path(spec, "_sweep.csv");
      const std::string json_path = out_path(spec, "_summary.json");
      write_file(csv_path, sweep_csv(r));
      write_file(json_path, sweep_json(spec, r));
      std::cout << csv_path << "\n" << json_path << "\n";
      return 0;
    }
    case ExperimentSpec::Command::sad: {
      SadSearchResult r = sad_max_weight(spec.sad_d, spec.sad_mu, spec.sad_max_updates);
      std::cout << "best_weight=" << fmt17(r.best) << "\n";
      std::cout << "bound=" << fmt17(1.0 / (spec.sad_d + 1)) << "\n";
      std::cout << "sequence=";
      for (std::size_t i = 0; i < r.best_sequence.size(); ++i)
        std::cout << (i ? "," : "") << r.best_sequence[i];
      std::cout << "\n";
      std::cout << "nodes_visited=" << r.nodes_visited << "\n";
      return 0;
    }
  }
  return 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    const ExperimentSpec spec = parse_args(args);
    return dispatch(spec);
  } catch (const HelpRequest& h) {
    std::cout << h.what();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mvd

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mvd/cli.hpp"

using namespace mvd;

namespace {

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::vector<double>> parse_csv_numbers(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      row.push_back(std::strtod(cell.c_str(), nullptr));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("parse_args: subcommands and defaults") {
  SUBCASE("theta-c") {
    const auto spec = parse_args(split_args("theta-c --gamma 0.3333333333 --tol 1e-8"));
    CHECK(spec.command == ExperimentSpec::Command::theta_c);
    CHECK(spec.sim.gamma == doctest::Approx(0.3333333333).epsilon(1e-12));
    CHECK(spec.tol == 1e-8);
  }
  SUBCASE("sweep grid with derived seeds") {
    const auto spec = parse_args(
        split_args("sweep --gamma 0.3333333333 --thetas 0.6,0.95 --replicates 8 --seed 7"));
    CHECK(spec.command == ExperimentSpec::Command::sweep);
    REQUIRE(spec.thetas.size() == 2);
    CHECK(spec.thetas[0] == 0.6);
    CHECK(spec.thetas[1] == 0.95);
    CHECK(spec.replicates == 8);
    CHECK(spec.sim.seed == 7);
    // documented defaults
    CHECK(spec.sim.mu == 0.5);
    CHECK(spec.sim.n_sites == 1000);
    CHECK(spec.sim.horizon == 1000.0);
    CHECK(spec.sim.boundary == Boundary::ring);
    CHECK(spec.sim.metric == Metric::total_variation);
    CHECK(spec.sim.simplify_tol == 1e-12);
  }
  SUBCASE("mu out of range is a usage error") {
    CHECK_THROWS_AS(parse_args(split_args("simulate --theta 0.5 --mu 0.7")), UsageError);
    try {
      parse_args(split_args("simulate --theta 0.5 --mu 0.7"));
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("mu") != std::string::npos);
    }
  }
  SUBCASE("unknown flag names itself") {
    try {
      parse_args(split_args("simulate --theta 0.5 --bogus 3"));
      FAIL("expected UsageError");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("--bogus") != std::string::npos);
    }
  }
  SUBCASE("sweep without a grid is a usage error") {
    CHECK_THROWS_AS(parse_args(split_args("sweep --gamma 0.2")), UsageError);
  }
  SUBCASE("config file supplies values, command line wins") {
    const auto dir = std::filesystem::temp_directory_path() / "mvd_cli_test";
    std::filesystem::create_directories(dir);
    const auto cfg_path = dir / "run.cfg";
    {
      std::ofstream os(cfg_path);
      os << "gamma=0.25\nn-sites=64\ntheta=0.4\n";
    }
    const auto spec = parse_args(
        split_args("simulate --config " + cfg_path.string() + " --n-sites 32"));
    CHECK(spec.sim.gamma == 0.25);
    CHECK(spec.sim.theta == 0.4);
    CHECK(spec.sim.n_sites == 32);
  }
}

TEST_CASE("run_sweep: ordering, determinism, medians") {
  ExperimentSpec spec;
  spec.command = ExperimentSpec::Command::sweep;
  spec.sim.gamma = 1.0 / 3.0;
  spec.sim.n_sites = 24;
  spec.sim.horizon = 40.0;
  spec.sim.seed = 5;
  spec.thetas = {0.2, 0.95};
  spec.replicates = 3;
  spec.parallelism = 2;

  const auto r1 = run_sweep(spec);
  const auto r2 = run_sweep(spec);
  REQUIRE(r1.cells.size() == 6);

  SUBCASE("cells ordered by (theta, replicate) with derived seeds") {
    for (std::size_t i = 0; i < r1.cells.size(); ++i) {
      CHECK(r1.cells[i].seed == spec.sim.seed + i);
      CHECK(r1.cells[i].replicate == static_cast<int>(i % 3));
      CHECK(r1.cells[i].theta == spec.thetas[i / 3]);
    }
  }
  SUBCASE("identical bytes on identical seeds") {
    CHECK(sweep_csv(r1) == sweep_csv(r2));
    CHECK(sweep_json(spec, r1) == sweep_json(spec, r2));
  }
  SUBCASE("csv round-trips exactly") {
    const std::string csv = sweep_csv(r1);
    const auto rows = parse_csv_numbers(csv);
    REQUIRE(rows.size() == r1.cells.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i][0] == r1.cells[i].theta);
      CHECK(rows[i][2] == r1.cells[i].diag.blocked_edge_fraction);
      CHECK(rows[i][3] == r1.cells[i].diag.max_neighbor_tv);
      CHECK(rows[i][4] == r1.cells[i].diag.mean_tv_to_intensity);
      CHECK(rows[i][5] == r1.cells[i].persistent_blocked);
    }
  }
  SUBCASE("deep subcritical keeps blocked edges") {
    CHECK(r1.summary[0].theta == 0.2);
    CHECK(r1.summary[0].median_persistent_blocked > 0.0);
  }
  SUBCASE("empty grid is a usage error") {
    ExperimentSpec bad = spec;
    bad.thetas.clear();
    CHECK_THROWS_AS(run_sweep(bad), UsageError);
  }
}

TEST_CASE("run_timeseries: header, cadence, monotone energy") {
  ExperimentSpec spec;
  spec.command = ExperimentSpec::Command::simulate;
  spec.sim.theta = 1.0;
  spec.sim.gamma = 1.0 / 3.0;
  spec.sim.n_sites = 16;
  spec.sim.horizon = 20.0;
  spec.sim.seed = 3;
  spec.sample_interval = 5.0;

  std::vector<PiecewiseLinearFn> finals;
  const std::string csv = run_timeseries(spec, &finals);
  CHECK(csv.rfind("t,max_neighbor_tv,blocked_fraction,mean_tv_to_intensity,energy_total\n", 0) ==
        0);
  const auto rows = parse_csv_numbers(csv);
  REQUIRE(rows.size() == 5);  // t = 0, 5, 10, 15, 20
  CHECK(rows.front()[0] == 0.0);
  CHECK(rows.back()[0] == 20.0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] <= rows[i - 1][4] + 1e-12);
  CHECK(finals.size() == 16);
}

TEST_CASE("run_cli: end-to-end exit codes and artifacts") {
  const auto dir = std::filesystem::temp_directory_path() / "mvd_cli_e2e";
  std::filesystem::create_directories(dir);

  auto call = [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"mvd"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  };

  SUBCASE("sad") { CHECK(call({"sad", "--d", "1", "--max-updates", "1"}) == 0); }
  SUBCASE("theta-c") {
    CHECK(call({"theta-c", "--gamma", "0.3333333333333333", "--tol", "1e-6"}) == 0);
  }
  SUBCASE("usage error is exit code 1") {
    CHECK(call({"simulate", "--theta", "0.5", "--mu", "0.7"}) == 1);
    CHECK(call({"nonsense"}) == 1);
  }
  SUBCASE("intensity writes the tabulation CSV") {
    CHECK(call({"intensity", "--gamma", "0.3333333333333333", "--n", "64", "--output-dir",
                dir.string(), "--prefix", "t"}) == 0);
    std::ifstream is(dir / "t_intensity.csv");
    REQUIRE(is.good());
    std::string header;
    std::getline(is, header);
    CHECK(header == "x,phi");
  }
  SUBCASE("simulate writes the time series") {
    CHECK(call({"simulate", "--theta", "0.9", "--gamma", "0.3333333333333333", "--n-sites",
                "12", "--horizon", "10", "--interval", "2", "--output-dir", dir.string(),
                "--prefix", "s"}) == 0);
    CHECK(std::filesystem::exists(dir / "s_timeseries.csv"));
  }
  SUBCASE("help exits 0") { CHECK(call({"--help"}) == 0); }
}

// Copyright 2026 The fdasf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fdasf run --config cfg.json --out results/
// fdasf validate --config cfg.json

#include "fdasf/harness.hpp"
#include "fdasf/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRunFailures = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fdasf::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Overrides {
  std::optional<std::string> problem;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<int> runs;
  std::optional<std::string> stats;
};

fdasf::ExperimentConfig load(const std::string& path, const Overrides& o) {
  fdasf::ExperimentConfig c = fdasf::parse_config(slurp(path));
  if (o.problem) {
    // Switching problem resets the dimensions to that problem's table values.
    const auto base = fdasf::table_config(fdasf::parse_problem(*o.problem));
    c.problem = base.problem;
    c.Q = base.Q;
    c.M = base.M;
    c.sigma_r2 = base.sigma_r2;
    c.sigma_n2 = base.sigma_n2;
    c.sigma_pi2 = base.sigma_pi2;
  }
  if (o.mode) c.mode = fdasf::parse_mode(*o.mode);
  if (o.seed) c.seed = *o.seed;
  if (o.iterations) c.iterations = *o.iterations;
  if (o.runs) c.monte_carlo_runs = *o.runs;
  if (o.stats) c.stats_mode = fdasf::parse_stats_mode(*o.stats);
  fdasf::validate_config(c);
  return c;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& o,
            unsigned threads, bool verify) {
  const fdasf::ExperimentConfig config = load(config_path, o);
  fdasf::RunOptions options;
  options.threads = threads;
  options.verify = verify;
  const fdasf::ExperimentReport report = fdasf::run_experiment(config, options);
  fdasf::write_report_files(report, out_dir);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& m : report.modes) {
    if (m.medse.empty()) continue;
    std::cout << fdasf::to_string(m.mode) << ": MedSE " << m.medse.front() << " -> "
              << m.medse.back() << ", median aux solves " << m.aux_median_cum.back() << '\n';
  }
  if (report.aux_ratio) std::cout << "aux-solve ratio dasf/fdasf: " << *report.aux_ratio << '\n';
  if (report.aborted) {
    std::cerr << "error: " << report.failed_runs << " of " << config.monte_carlo_runs
              << " runs failed\n";
    for (const auto& m : report.modes) {
      for (const auto& r : m.runs) {
        if (r.failed) std::cerr << "  run " << r.run << " (" << fdasf::to_string(m.mode)
                                << "): " << r.error << '\n';
      }
    }
    return kExitRunFailures;
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const fdasf::ExperimentConfig config = load(config_path, {});
  const int J = fdasf::constraint_count(config.problem, config.Q);
  const auto instance = fdasf::make_instance(config, 0);
  const auto bounds = fdasf::check_constraint_bounds(J, config.Q, instance.topology);
  std::cout << "config ok: " << fdasf::to_string(config.problem) << " M=" << config.M
            << " K=" << config.K << " Q=" << config.Q << '\n'
            << "run 0 topology: " << bounds.summary() << '\n';
  if (!bounds.any()) {
    std::cout << "warning: neither sufficient bound holds; fixed points may not all be "
                 "stationary\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F-DASF / DASF distributed fractional-program simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  Overrides o;
  unsigned threads = 0;
  bool verify = false;

  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--problem", o.problem, "tro | rtls | qol");
  run->add_option("--mode", o.mode, "fdasf | dasf | both");
  run->add_option("--seed", o.seed, "Master seed");
  run->add_option("--iterations", o.iterations, "Iterations per run");
  run->add_option("--runs", o.runs, "Monte Carlo runs");
  run->add_option("--stats", o.stats, "empirical | exact");
  run->add_option("--threads", threads, "Worker threads (0: all cores)");
  run->add_flag("--verify", verify, "Dense consistency checks every iteration");

  auto* validate = app.add_subcommand("validate", "Check a config and the constraint-count bounds");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, o, threads, verify);
    return cmd_validate(config_path);
  } catch (const fdasf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fdasf::TopologyError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

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

#pragma once

#include "fdasf/dasf.hpp"
#include "fdasf/fracprog.hpp"
#include "fdasf/netgraph.hpp"
#include "fdasf/signals.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdasf {

enum class ProblemKind { Tro, Rtls, Qol };
enum class ModeSelection { FDASF, DASF, Both };

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct AdaptiveConfig {
  std::vector<RampProfile::Knot> knots;
  double delta_variance = 1e-4;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Tro;
  ModeSelection mode = ModeSelection::Both;
  Index Q = 2;
  int K = 10;
  Index M = 50;
  double sigma_r2 = 0.5;
  double sigma_n2 = 0.1;
  double sigma_pi2 = 0.1;
  Index N = 10000;
  int iterations = 200;
  int monte_carlo_runs = 100;
  std::uint64_t seed = 1;
  StatsMode stats_mode = StatsMode::Empirical;
  /// Stationary empirical runs: false measures one N-sample batch and reuses it
  /// every iteration (reference solved on that batch); true draws a fresh batch
  /// per iteration and scores against the exact-statistics optimum. Adaptive
  /// runs always use consecutive windows.
  bool fresh_batches = true;
  double er_probability = 0.8;
  std::optional<AdaptiveConfig> adaptive;
  DinkelbachOptions baseline;
  /// Source counts; 0 selects the per-problem default.
  Index s_sources = 0;
  Index r_sources = -1;
};

/// Parameters of the three stationary experiments (K = 10, N = 10^4, 100 runs).
ExperimentConfig table_config(ProblemKind problem);

/// Throws ConfigError on malformed JSON, unknown enum values or broken bounds.
ExperimentConfig parse_config(std::string_view json);
std::string config_to_json(const ExperimentConfig& config);
void validate_config(const ExperimentConfig& config);

std::string_view to_string(ProblemKind kind);
std::string_view to_string(Mode mode);
std::string_view to_string(StatsMode mode);
std::string_view to_string(ModeSelection mode);
ProblemKind parse_problem(std::string_view text);
ModeSelection parse_mode(std::string_view text);
StatsMode parse_stats_mode(std::string_view text);

/// Number of constraints h_j of a problem class with Q columns.
int constraint_count(ProblemKind kind, Index Q);

/// Everything one Monte Carlo run needs, drawn from seeds derived from
/// (config.seed, run).
struct ProblemInstance {
  Topology topology;
  SignalModel model;
  std::unique_ptr<FractionalProblem> problem;
  std::vector<Matrix> fixed;  // network-wide deterministic matrices
  ExactStats exact;           // at t = 0
  ProblemData central;        // exact statistics + fixed
  std::uint64_t run_seed = 0;
};

std::uint64_t run_seed(const ExperimentConfig& config, int run);
ProblemInstance make_instance(const ExperimentConfig& config, int run);

/// Random Gaussian start repaired into the feasible set (no auxiliary solve).
Matrix initial_point(const ProblemInstance& instance, std::uint64_t seed);

/// Tight-tolerance centralized Dinkelbach solve.
DinkelbachResult centralized_reference(const FractionalProblem& problem, const ProblemData& data,
                                       const Matrix& X0, double tol = 1e-12, int max_iter = 100);

/// Column signs of X* matched to X_final for sign-ambiguous problems.
Matrix align_reference(const Matrix& reference, const Matrix& final_iterate,
                       const FractionalProblem& problem);

/// ||X - X*||_F^2 / ||X*||_F^2.
double relative_squared_error(const Matrix& X, const Matrix& reference);

/// Element-wise lower median over equal-length curves.
std::vector<double> medse(const std::vector<std::vector<double>>& runs);

struct IterationRecord {
  int iteration = 0;
  Index t = 0;
  NodeId updating_node = 0;  // zero-based
  double rho = 0.0;          // reported sign convention
  double rel_sq_error = 0.0;
  long long aux_solves_cum = 0;
  long long scalars_cum = 0;
  double constraint_residual = 0.0;
  bool valid = true;
  double consistency_error = 0.0;  // verify mode
  double update_error = 0.0;       // verify mode
};

struct RunResult {
  int run = 0;
  Mode mode = Mode::FDASF;
  bool failed = false;
  std::string error;
  std::vector<IterationRecord> records;
  Matrix final_iterate;
  double final_constraint_residual = 0.0;
  bool final_valid = true;
  Matrix reference;        // aligned; last window's reference in adaptive runs
  double rho_star = 0.0;   // reported sign convention
  std::uint64_t batch_checksum = 0;
};

struct ModeSummary {
  Mode mode = Mode::FDASF;
  std::vector<RunResult> runs;
  std::vector<double> medse;
  std::vector<double> aux_median_cum;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ModeSummary> modes;
  std::optional<double> aux_ratio;  // DASF / F-DASF
  int failed_runs = 0;
  bool aborted = false;  // more than 5% of the runs failed
  std::vector<std::string> warnings;

  const ModeSummary* find(Mode mode) const;
};

struct RunOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  bool verify = false;   // dense consistency checks every iteration
};

/// Monte Carlo campaign. Both modes of a run consume identical sample batches.
/// With an adaptive config, references are recomputed per window from that
/// window's sample statistics.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// One run of the configured modes (used by run_experiment).
std::vector<RunResult> run_single(const ExperimentConfig& config, int run,
                                  const RunOptions& options = {});

/// Writers; doubles use 17 significant digits.
std::string report_json(const ExperimentReport& report);
std::string curves_csv(const ExperimentReport& report);
std::string medse_csv(const ExperimentReport& report);
void write_report_files(const ExperimentReport& report, const std::string& directory);

inline constexpr std::string_view kCurvesHeader =
    "mode,run,iteration,t,updating_node,rho,rel_sq_error,aux_solves_cum,scalars_cum,"
    "constraint_residual";
inline constexpr std::string_view kMedseHeader = "mode,iteration,t,medse,aux_solves_median_cum";

}  // namespace fdasf

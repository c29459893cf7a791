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

#include "fdasf/harness.hpp"

#include "fdasf/problems.hpp"
#include "fdasf/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <random>
#include <set>
#include <thread>

namespace fdasf {

namespace {

using nlohmann::json;

enum SeedStream : std::uint64_t {
  kTopologyStream = 1,
  kModelStream = 2,
  kFixedStream = 3,
  kInitStream = 4,
  kSampleStream = 5,
};

Index default_s_sources(const ExperimentConfig& c) {
  if (c.s_sources > 0) return c.s_sources;
  return c.problem == ProblemKind::Rtls ? 1 : c.Q;
}

Index default_r_sources(const ExperimentConfig& c) {
  if (c.r_sources >= 0) return c.r_sources;
  return c.problem == ProblemKind::Tro ? c.Q : 0;
}

template <typename T>
T get_field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc[key].is_null()) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const char* where) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError(std::string("unknown ") + where + " field '" + it.key() + "'");
    }
  }
}

std::uint64_t mix_doubles(std::uint64_t h, const double* data, Index count) {
  for (Index i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, data + i, sizeof(bits));
    h = mix64(h ^ bits);
  }
  return h;
}

/// Lower median of a copy of the values.
template <typename T>
T lower_median(std::vector<T> values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

std::vector<Mode> selected_modes(ModeSelection selection) {
  switch (selection) {
    case ModeSelection::FDASF: return {Mode::FDASF};
    case ModeSelection::DASF: return {Mode::DASF};
    case ModeSelection::Both: return {Mode::FDASF, Mode::DASF};
  }
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Tro: return "tro";
    case ProblemKind::Rtls: return "rtls";
    case ProblemKind::Qol: return "qol";
  }
  return "?";
}

std::string_view to_string(Mode mode) { return mode == Mode::FDASF ? "fdasf" : "dasf"; }

std::string_view to_string(StatsMode mode) {
  return mode == StatsMode::Empirical ? "empirical" : "exact";
}

std::string_view to_string(ModeSelection mode) {
  switch (mode) {
    case ModeSelection::FDASF: return "fdasf";
    case ModeSelection::DASF: return "dasf";
    case ModeSelection::Both: return "both";
  }
  return "?";
}

ProblemKind parse_problem(std::string_view text) {
  if (text == "tro") return ProblemKind::Tro;
  if (text == "rtls") return ProblemKind::Rtls;
  if (text == "qol") return ProblemKind::Qol;
  throw ConfigError("unknown problem '" + std::string(text) + "' (tro, rtls, qol)");
}

ModeSelection parse_mode(std::string_view text) {
  if (text == "fdasf") return ModeSelection::FDASF;
  if (text == "dasf") return ModeSelection::DASF;
  if (text == "both") return ModeSelection::Both;
  throw ConfigError("unknown mode '" + std::string(text) + "' (fdasf, dasf, both)");
}

StatsMode parse_stats_mode(std::string_view text) {
  if (text == "empirical") return StatsMode::Empirical;
  if (text == "exact") return StatsMode::Exact;
  throw ConfigError("unknown stats_mode '" + std::string(text) + "' (empirical, exact)");
}

int constraint_count(ProblemKind kind, Index Q) {
  switch (kind) {
    case ProblemKind::Tro: return static_cast<int>(Q * (Q + 1) / 2);
    case ProblemKind::Rtls: return 1;
    case ProblemKind::Qol: return 0;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig table_config(ProblemKind problem) {
  ExperimentConfig c;
  c.problem = problem;
  c.K = 10;
  c.N = 10000;
  c.monte_carlo_runs = 100;
  c.sigma_r2 = 0.5;
  switch (problem) {
    case ProblemKind::Rtls:
      c.Q = 1;
      c.M = 50;
      c.sigma_n2 = 0.2;
      c.sigma_pi2 = 0.3;
      break;
    case ProblemKind::Tro:
      c.Q = 2;
      c.M = 50;
      c.sigma_n2 = 0.1;
      c.sigma_pi2 = 0.1;
      break;
    case ProblemKind::Qol:
      c.Q = 2;
      c.M = 100;
      c.sigma_n2 = 0.2;
      c.sigma_pi2 = 0.2;
      break;
  }
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (c.K < 2) throw ConfigError("K must be at least 2");
  if (c.M < c.K || c.M % c.K != 0) throw ConfigError("M must be a positive multiple of K");
  if (c.Q < 1 || c.Q > c.M / c.K) throw ConfigError("Q must satisfy 1 <= Q <= M/K");
  if (c.problem == ProblemKind::Rtls && c.Q != 1) throw ConfigError("rtls requires Q = 1");
  if (!(c.sigma_r2 > 0.0) || !(c.sigma_n2 > 0.0) || !(c.sigma_pi2 > 0.0)) {
    throw ConfigError("variances must be strictly positive");
  }
  if (c.N < 1) throw ConfigError("N must be at least 1");
  if (c.iterations < 0) throw ConfigError("iterations must be non-negative");
  if (c.monte_carlo_runs < 1) throw ConfigError("monte_carlo_runs must be at least 1");
  if (!(c.er_probability >= 0.0 && c.er_probability <= 1.0)) {
    throw ConfigError("er_probability must lie in [0, 1]");
  }
  if (!(c.baseline.tol > 0.0) || c.baseline.max_iter < 1) {
    throw ConfigError("baseline needs tol > 0 and max_iter >= 1");
  }
  if (c.adaptive) {
    if (!(c.adaptive->delta_variance > 0.0)) throw ConfigError("delta_variance must be positive");
    try {
      RampProfile check(c.adaptive->knots);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("adaptive knots: ") + e.what());
    }
  }
  if (c.s_sources < 0) throw ConfigError("s_sources must be non-negative");
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"problem", "mode", "Q", "K", "M", "variances", "N", "iterations",
                  "monte_carlo_runs", "seed", "stats_mode", "fresh_batches", "er_probability", "adaptive",
                  "baseline", "s_sources", "r_sources"},
                 "config");

  ExperimentConfig c;
  if (doc.contains("problem")) {
    c = table_config(parse_problem(get_field<std::string>(doc, "problem", "tro")));
  }
  if (doc.contains("mode")) c.mode = parse_mode(get_field<std::string>(doc, "mode", "both"));
  c.Q = get_field<Index>(doc, "Q", c.Q);
  c.K = get_field<int>(doc, "K", c.K);
  c.M = get_field<Index>(doc, "M", c.M);
  if (doc.contains("variances")) {
    const json& v = doc["variances"];
    if (!v.is_object()) throw ConfigError("variances must be an object");
    reject_unknown(v, {"sigma_r2", "sigma_n2", "sigma_pi2"}, "variances");
    c.sigma_r2 = get_field<double>(v, "sigma_r2", c.sigma_r2);
    c.sigma_n2 = get_field<double>(v, "sigma_n2", c.sigma_n2);
    c.sigma_pi2 = get_field<double>(v, "sigma_pi2", c.sigma_pi2);
  }
  c.N = get_field<Index>(doc, "N", c.N);
  c.iterations = get_field<int>(doc, "iterations", c.iterations);
  c.monte_carlo_runs = get_field<int>(doc, "monte_carlo_runs", c.monte_carlo_runs);
  c.seed = get_field<std::uint64_t>(doc, "seed", c.seed);
  if (doc.contains("stats_mode")) {
    c.stats_mode = parse_stats_mode(get_field<std::string>(doc, "stats_mode", "empirical"));
  }
  c.fresh_batches = get_field<bool>(doc, "fresh_batches", c.fresh_batches);
  c.er_probability = get_field<double>(doc, "er_probability", c.er_probability);
  c.s_sources = get_field<Index>(doc, "s_sources", c.s_sources);
  c.r_sources = get_field<Index>(doc, "r_sources", c.r_sources);
  if (doc.contains("adaptive") && !doc["adaptive"].is_null()) {
    const json& a = doc["adaptive"];
    if (!a.is_object()) throw ConfigError("adaptive must be an object or null");
    reject_unknown(a, {"knots", "delta_variance"}, "adaptive");
    AdaptiveConfig ac;
    ac.delta_variance = get_field<double>(a, "delta_variance", ac.delta_variance);
    if (a.contains("knots")) {
      for (const auto& k : a["knots"]) {
        if (!k.is_array() || k.size() != 2) throw ConfigError("adaptive knots must be [t, p] pairs");
        ac.knots.push_back({k[0].get<double>(), k[1].get<double>()});
      }
    }
    c.adaptive = std::move(ac);
  }
  if (doc.contains("baseline")) {
    const json& b = doc["baseline"];
    if (!b.is_object()) throw ConfigError("baseline must be an object");
    reject_unknown(b, {"tol", "max_iter"}, "baseline");
    c.baseline.tol = get_field<double>(b, "tol", c.baseline.tol);
    c.baseline.max_iter = get_field<int>(b, "max_iter", c.baseline.max_iter);
  }
  validate_config(c);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["problem"] = to_string(c.problem);
  doc["mode"] = to_string(c.mode);
  doc["Q"] = c.Q;
  doc["K"] = c.K;
  doc["M"] = c.M;
  doc["variances"] = {{"sigma_r2", c.sigma_r2}, {"sigma_n2", c.sigma_n2}, {"sigma_pi2", c.sigma_pi2}};
  doc["N"] = c.N;
  doc["iterations"] = c.iterations;
  doc["monte_carlo_runs"] = c.monte_carlo_runs;
  doc["seed"] = c.seed;
  doc["stats_mode"] = to_string(c.stats_mode);
  doc["fresh_batches"] = c.fresh_batches;
  doc["er_probability"] = c.er_probability;
  if (c.adaptive) {
    json knots = json::array();
    for (const auto& k : c.adaptive->knots) knots.push_back({k.t, k.value});
    doc["adaptive"] = {{"knots", knots}, {"delta_variance", c.adaptive->delta_variance}};
  } else {
    doc["adaptive"] = nullptr;
  }
  doc["baseline"] = {{"tol", c.baseline.tol}, {"max_iter", c.baseline.max_iter}};
  if (c.s_sources > 0) doc["s_sources"] = c.s_sources;
  if (c.r_sources >= 0) doc["r_sources"] = c.r_sources;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Instances and references

std::uint64_t run_seed(const ExperimentConfig& config, int run) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(run));
}

ProblemInstance make_instance(const ExperimentConfig& config, int run) {
  validate_config(config);
  const std::uint64_t rs = run_seed(config, run);
  const std::vector<int> channels(static_cast<std::size_t>(config.K),
                                  static_cast<int>(config.M / config.K));
  Topology topology = generate_erdos_renyi(config.K, config.er_probability, channels,
                                           derive_seed(rs, kTopologyStream));

  SignalParams params;
  params.source_var = config.sigma_r2;
  params.noise_var = config.sigma_n2;
  params.mixture_var = config.sigma_pi2;
  const Index S = default_s_sources(config);
  const Index R = default_r_sources(config);
  SignalModel model =
      config.adaptive
          ? draw_adaptive_model(config.M, S, R, params, config.adaptive->delta_variance,
                                RampProfile(config.adaptive->knots), derive_seed(rs, kModelStream))
          : draw_model(config.M, S, R, params, derive_seed(rs, kModelStream));
  ExactStats exact = exact_stats(model, 0.0);

  std::mt19937_64 rng(derive_seed(rs, kFixedStream));
  std::vector<Matrix> fixed;
  std::unique_ptr<FractionalProblem> problem;
  switch (config.problem) {
    case ProblemKind::Tro:
      fixed = {Matrix::Identity(config.M, config.M)};
      problem = tro_problem(config.Q);
      break;
    case ProblemKind::Rtls: {
      std::normal_distribution<double> diag(1.0, std::sqrt(0.1));
      Vector l(config.M);
      for (Index i = 0; i < config.M; ++i) l(i) = diag(rng);
      fixed = {Matrix::Identity(config.M, config.M), Matrix(l.asDiagonal())};
      problem = rtls_problem();
      break;
    }
    case ProblemKind::Qol: {
      std::normal_distribution<double> normal(0.0, 1.0);
      Matrix A(config.M, config.Q);
      Matrix B(config.M, config.Q);
      for (Index j = 0; j < config.Q; ++j)
        for (Index i = 0; i < config.M; ++i) A(i, j) = normal(rng);
      for (Index j = 0; j < config.Q; ++j)
        for (Index i = 0; i < config.M; ++i) B(i, j) = normal(rng);
      const double c = qol_default_offset(exact.Ryy, A, B);
      fixed = {A, B};
      problem = qol_problem(config.Q, c);
      break;
    }
  }

  ProblemData central;
  central.Ryy = exact.Ryy;
  if (problem->uses_v()) central.Rvv = exact.Rvv;
  if (problem->uses_d()) {
    central.ryd = exact.ryd;
    central.rdd = exact.rdd;
  }
  central.fixed = fixed;
  return ProblemInstance{std::move(topology), std::move(model), std::move(problem),
                         std::move(fixed),    std::move(exact), std::move(central), rs};
}

Matrix initial_point(const ProblemInstance& instance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index M = instance.topology.total_channels();
  const Index Q = instance.problem->columns();
  Matrix raw(M, Q);
  for (Index j = 0; j < Q; ++j)
    for (Index i = 0; i < M; ++i) raw(i, j) = normal(rng);
  return instance.problem->make_feasible(raw, instance.central);
}

DinkelbachResult centralized_reference(const FractionalProblem& problem, const ProblemData& data,
                                       const Matrix& X0, double tol, int max_iter) {
  DinkelbachOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return dinkelbach_solve(problem, data, X0, options);
}

Matrix align_reference(const Matrix& reference, const Matrix& final_iterate,
                       const FractionalProblem& problem) {
  if (reference.rows() != final_iterate.rows() || reference.cols() != final_iterate.cols()) {
    throw InvalidArgument("align_reference: shape mismatch");
  }
  return problem.select_solution(reference, final_iterate);
}

double relative_squared_error(const Matrix& X, const Matrix& reference) {
  return (X - reference).squaredNorm() / reference.squaredNorm();
}

std::vector<double> medse(const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) throw InvalidArgument("medse: no runs");
  const std::size_t n = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != n) throw InvalidArgument("medse: curves differ in length");
  }
  std::vector<double> out(n);
  std::vector<double> column(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r][i];
    out[i] = lower_median(column);
  }
  return out;
}

const ModeSummary* ExperimentReport::find(Mode mode) const {
  for (const auto& m : modes) {
    if (m.mode == mode) return &m;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Runs

std::vector<RunResult> run_single(const ExperimentConfig& config, int run,
                                  const RunOptions& options) {
  const std::vector<Mode> modes = selected_modes(config.mode);
  std::vector<RunResult> results(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    results[m].run = run;
    results[m].mode = modes[m];
  }

  auto fail_all = [&](const std::string& what) {
    for (auto& r : results) {
      r.failed = true;
      r.error = what;
    }
    return results;
  };

  ProblemInstance inst = make_instance(config, run);
  const FractionalProblem& problem = *inst.problem;
  const bool adaptive = config.adaptive.has_value();
  const bool empirical = config.stats_mode == StatsMode::Empirical;
  const bool reuse_batch = empirical && !adaptive && !config.fresh_batches;
  const std::uint64_t sample_seed = derive_seed(inst.run_seed, kSampleStream);

  Matrix X0;
  DinkelbachResult stationary_ref;
  SampleBatch fixed_batch;
  try {
    X0 = initial_point(inst, derive_seed(inst.run_seed, kInitStream));
    if (reuse_batch) {
      fixed_batch = sample_batch(inst.model, 0, config.N, sample_seed);
      IterationInput batch_input;
      batch_input.batch = &fixed_batch;
      stationary_ref =
          centralized_reference(problem, global_data(batch_input, inst.fixed, problem), X0);
    } else if (!adaptive) {
      stationary_ref = centralized_reference(problem, inst.central, X0);
    }
  } catch (const Error& e) {
    return fail_all(std::string("setup: ") + e.what());
  }

  ProblemData fixed_only;
  fixed_only.fixed = inst.fixed;
  const double X0_residual = problem.constraint_violation(X0, fixed_only);

  std::vector<DistributedState> states(modes.size(), DistributedState::from_stacked(X0, inst.topology));
  std::vector<std::vector<Matrix>> iterates(modes.size());
  std::vector<IterationMetrics> last(modes.size());
  std::vector<Matrix> window_refs;
  std::vector<double> window_rho;
  Matrix prev_ref = X0;

  EngineOptions engine;
  engine.inner = config.baseline;
  engine.verify = options.verify;

  for (int i = 0; i < config.iterations; ++i) {
    const Index t0 = static_cast<Index>(i) * config.N;
    SampleBatch batch;
    ExactStats window_exact;
    IterationInput input;
    input.nominal_samples = config.N;
    try {
      if (reuse_batch) {
        input.batch = &fixed_batch;
      } else if (empirical) {
        batch = sample_batch(inst.model, t0, config.N, sample_seed);
        input.batch = &batch;
      } else if (adaptive) {
        window_exact = exact_stats(inst.model, static_cast<double>(t0));
        input.exact = &window_exact;
      } else {
        input.exact = &inst.exact;
      }
      if (adaptive) {
        const ProblemData window = global_data(input, inst.fixed, problem);
        DinkelbachResult ref = centralized_reference(problem, window, prev_ref);
        prev_ref = problem.select_solution(ref.X, prev_ref);
        window_refs.push_back(prev_ref);
        window_rho.push_back(ref.rho);
      }
    } catch (const Error& e) {
      return fail_all("iteration " + std::to_string(i) + ": " + e.what());
    }

    for (std::size_t m = 0; m < modes.size(); ++m) {
      RunResult& res = results[m];
      if (res.failed) continue;
      IterationRecord rec;
      rec.iteration = i;
      rec.t = t0;
      rec.constraint_residual = i == 0 ? X0_residual : last[m].constraint_residual;
      rec.valid = i == 0 ? true : last[m].valid;
      iterates[m].push_back(states[m].stacked());
      if (input.batch) {
        res.batch_checksum =
            mix_doubles(res.batch_checksum, input.batch->y.data(), input.batch->y.size());
      }
      try {
        engine.mode = modes[m];
        const IterationMetrics met = iterate(states[m], inst.topology, problem, inst.fixed, input, engine);
        rec.updating_node = met.updating_node;
        rec.rho = problem.reported(met.rho);
        const long long prev_aux = res.records.empty() ? 0 : res.records.back().aux_solves_cum;
        const long long prev_scalars = res.records.empty() ? 0 : res.records.back().scalars_cum;
        rec.aux_solves_cum = prev_aux + met.aux_solves;
        rec.scalars_cum = prev_scalars + met.scalars_transmitted;
        rec.consistency_error = met.consistency_error.value_or(0.0);
        rec.update_error = met.update_error.value_or(0.0);
        last[m] = met;
        res.records.push_back(rec);
      } catch (const Error& e) {
        res.failed = true;
        res.error = "iteration " + std::to_string(i) + ": " + e.what();
      }
    }
  }

  for (std::size_t m = 0; m < modes.size(); ++m) {
    RunResult& res = results[m];
    if (res.failed) continue;
    res.final_iterate = states[m].stacked();
    res.final_constraint_residual =
        config.iterations == 0 ? X0_residual : last[m].constraint_residual;
    res.final_valid = config.iterations == 0 ? true : last[m].valid;
    if (!adaptive) {
      res.reference = align_reference(stationary_ref.X, res.final_iterate, problem);
      res.rho_star = problem.reported(stationary_ref.rho);
      for (std::size_t i = 0; i < res.records.size(); ++i) {
        res.records[i].rel_sq_error = relative_squared_error(iterates[m][i], res.reference);
      }
    } else if (!window_refs.empty()) {
      // One sign pattern for the whole reference chain, fixed at the last window.
      const Matrix& last_ref = window_refs.back();
      const Matrix aligned = align_reference(last_ref, iterates[m].back(), problem);
      Vector flip(last_ref.cols());
      for (Index j = 0; j < last_ref.cols(); ++j) {
        flip(j) = aligned.col(j).dot(last_ref.col(j)) < 0.0 ? -1.0 : 1.0;
      }
      for (std::size_t i = 0; i < res.records.size(); ++i) {
        const Matrix ref = window_refs[i] * flip.asDiagonal();
        res.records[i].rel_sq_error = relative_squared_error(iterates[m][i], ref);
      }
      res.reference = aligned;
      res.rho_star = problem.reported(window_rho.back());
    }
  }
  return results;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate_config(config);
  const int runs = config.monte_carlo_runs;
  std::vector<std::vector<RunResult>> per_run(static_cast<std::size_t>(runs));

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(runs)));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next++; r < runs; r = next++) {
      try {
        per_run[static_cast<std::size_t>(r)] = run_single(config, r, options);
      } catch (const std::exception& e) {
        std::vector<RunResult> failed;
        for (Mode mode : selected_modes(config.mode)) {
          RunResult res;
          res.run = r;
          res.mode = mode;
          res.failed = true;
          res.error = e.what();
          failed.push_back(std::move(res));
        }
        per_run[static_cast<std::size_t>(r)] = std::move(failed);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentReport report;
  report.config = config;
  const auto modes = selected_modes(config.mode);
  std::vector<char> run_failed(static_cast<std::size_t>(runs), 0);
  for (int r = 0; r < runs; ++r) {
    for (const auto& res : per_run[static_cast<std::size_t>(r)]) {
      if (res.failed) run_failed[static_cast<std::size_t>(r)] = 1;
    }
  }
  report.failed_runs = static_cast<int>(std::count(run_failed.begin(), run_failed.end(), 1));
  if (report.failed_runs > 0) {
    report.warnings.push_back(std::to_string(report.failed_runs) + " of " + std::to_string(runs) +
                              " runs failed and were excluded");
  }
  report.aborted = report.failed_runs > 0.05 * runs;

  for (std::size_t m = 0; m < modes.size(); ++m) {
    ModeSummary summary;
    summary.mode = modes[m];
    std::vector<std::vector<double>> errors;
    std::vector<std::vector<long long>> aux;
    for (int r = 0; r < runs; ++r) {
      RunResult& res = per_run[static_cast<std::size_t>(r)][m];
      if (!run_failed[static_cast<std::size_t>(r)]) {
        std::vector<double> e;
        std::vector<long long> a;
        for (const auto& rec : res.records) {
          e.push_back(rec.rel_sq_error);
          a.push_back(rec.aux_solves_cum);
        }
        errors.push_back(std::move(e));
        aux.push_back(std::move(a));
      }
      summary.runs.push_back(std::move(res));
    }
    if (!errors.empty()) {
      summary.medse = medse(errors);
      const std::size_t n = aux.front().size();
      std::vector<long long> column(aux.size());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < aux.size(); ++r) column[r] = aux[r][i];
        summary.aux_median_cum.push_back(static_cast<double>(lower_median(column)));
      }
    }
    report.modes.push_back(std::move(summary));
  }

  const ModeSummary* f = report.find(Mode::FDASF);
  const ModeSummary* d = report.find(Mode::DASF);
  if (f && d && !f->aux_median_cum.empty() && f->aux_median_cum.size() == d->aux_median_cum.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f->aux_median_cum.size(); ++i) {
      sum += d->aux_median_cum[i] / f->aux_median_cum[i];
    }
    report.aux_ratio = sum / static_cast<double>(f->aux_median_cum.size());
  }
  return report;
}

}  // namespace fdasf

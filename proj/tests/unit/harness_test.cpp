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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fdasf {
namespace {

ExperimentConfig small(ProblemKind kind) {
  ExperimentConfig c = table_config(kind);
  c.M = 20;
  c.N = 400;
  c.iterations = 30;
  c.monte_carlo_runs = 3;
  return c;
}

TEST(Config, TableValues) {
  const auto r = table_config(ProblemKind::Rtls);
  EXPECT_EQ(r.Q, 1);
  EXPECT_EQ(r.M, 50);
  EXPECT_DOUBLE_EQ(r.sigma_pi2, 0.3);
  const auto q = table_config(ProblemKind::Qol);
  EXPECT_EQ(q.M, 100);
  EXPECT_EQ(q.K, 10);
  EXPECT_EQ(q.N, 10000);
  EXPECT_EQ(q.monte_carlo_runs, 100);
}

TEST(Config, ParseAndRoundTrip) {
  const auto c = parse_config(R"({"problem":"qol","mode":"dasf","seed":9,"iterations":12,
      "variances":{"sigma_n2":0.3},"baseline":{"tol":1e-6,"max_iter":5},"stats_mode":"exact",
      "adaptive":{"knots":[[0,0],[10,1]],"delta_variance":1e-3}})");
  EXPECT_EQ(c.problem, ProblemKind::Qol);
  EXPECT_EQ(c.mode, ModeSelection::DASF);
  EXPECT_EQ(c.M, 100);  // table value of the chosen problem
  EXPECT_DOUBLE_EQ(c.sigma_n2, 0.3);
  EXPECT_DOUBLE_EQ(c.sigma_pi2, 0.2);
  EXPECT_EQ(c.baseline.max_iter, 5);
  ASSERT_TRUE(c.adaptive.has_value());
  EXPECT_EQ(c.adaptive->knots.size(), 2u);
  const auto back = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config("[]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"problem":"lasso"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"modes":"both"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"M":55})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"Q":6})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"problem":"rtls","Q":2})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"variances":{"sigma_r2":0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"N":"many"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"adaptive":{"knots":[[0,2]]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"er_probability":1.5})"), ConfigError);
}

TEST(Medse, LowerMedianConvention) {
  EXPECT_EQ(medse({{0.5, 0.25}}), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(medse({{0.0}, {0.0}, {1.0}}), std::vector<double>{0.0});
  EXPECT_EQ(medse({{1.0}, {2.0}, {3.0}, {4.0}}), std::vector<double>{2.0});
  EXPECT_THROW(medse({}), InvalidArgument);
  EXPECT_THROW(medse({{1.0}, {1.0, 2.0}}), InvalidArgument);
}

TEST(AlignReference, SignOrbit) {
  const auto tro = tro_problem(2);
  Matrix X(3, 2);
  X << 1, 0, 0, 1, 0, 0;
  Matrix final_iter = X;
  final_iter.col(1) *= -1.0;
  const Matrix a = align_reference(X, final_iter, *tro);
  EXPECT_EQ(relative_squared_error(final_iter, a), 0.0);
  EXPECT_EQ(align_reference(X, X, *tro), X);
  const auto one = tro_problem(1);
  EXPECT_EQ(align_reference(X.col(0), -X.col(0), *one), Matrix(-X.col(0)));
  const auto qol = qol_problem(2, 1.0);
  EXPECT_EQ(align_reference(X, -X, *qol), X);
  EXPECT_THROW(align_reference(X, Matrix::Zero(2, 2), *tro), InvalidArgument);
}

TEST(Instance, DeterministicAndFeasibleStart) {
  for (auto kind : {ProblemKind::Tro, ProblemKind::Rtls, ProblemKind::Qol}) {
    const auto c = small(kind);
    const auto a = make_instance(c, 1);
    const auto b = make_instance(c, 1);
    EXPECT_EQ(a.topology.edges(), b.topology.edges());
    EXPECT_EQ(a.model.mixture_s, b.model.mixture_s);
    const Matrix X0 = initial_point(a, 5);
    EXPECT_EQ(X0, initial_point(b, 5));
    EXPECT_TRUE(a.problem->valid(X0, a.central));
    EXPECT_LE(a.problem->constraint_violation(X0, a.central), 1e-12);
    const auto ra = centralized_reference(*a.problem, a.central, X0);
    const auto rb = centralized_reference(*b.problem, b.central, X0);
    EXPECT_EQ(ra.X, rb.X);
  }
}

TEST(Instance, QolReferenceMatchesClosedForm) {
  const auto c = small(ProblemKind::Qol);
  const auto inst = make_instance(c, 0);
  const auto ref = centralized_reference(*inst.problem, inst.central, initial_point(inst, 1));
  const auto& qol = static_cast<const QolProblem&>(*inst.problem);
  const auto cf = qol_closed_form(inst.exact.Ryy, inst.fixed[0], inst.fixed[1], qol.offset());
  EXPECT_LE(relative_squared_error(ref.X, cf.X), 1e-8);
  EXPECT_NEAR(ref.rho, cf.rho, 1e-8 * std::abs(cf.rho));
}

TEST(Instance, TroReferenceIsARootOfG) {
  const auto c = small(ProblemKind::Tro);
  const auto inst = make_instance(c, 0);
  const auto ref = centralized_reference(*inst.problem, inst.central, initial_point(inst, 1));
  EXPECT_LE(std::abs(g_value(*inst.problem, ref.rho, inst.central, ref.X)), 1e-9);
}

TEST(RunExperiment, ZeroIterations) {
  auto c = small(ProblemKind::Tro);
  c.iterations = 0;
  const auto r = run_experiment(c);
  ASSERT_EQ(r.modes.size(), 2u);
  EXPECT_TRUE(r.modes[0].medse.empty());
  EXPECT_FALSE(r.aborted);
  EXPECT_EQ(medse_csv(r), std::string(kMedseHeader) + "\n");
}

TEST(RunExperiment, RecordsPairingAndInvariants) {
  for (auto kind : {ProblemKind::Tro, ProblemKind::Rtls, ProblemKind::Qol}) {
    auto c = small(kind);
    const auto r = run_experiment(c);
    ASSERT_EQ(r.modes.size(), 2u);
    EXPECT_EQ(r.failed_runs, 0);
    const auto* f = r.find(Mode::FDASF);
    const auto* d = r.find(Mode::DASF);
    ASSERT_TRUE(f && d);
    ASSERT_TRUE(r.aux_ratio.has_value());
    EXPECT_GE(*r.aux_ratio, 1.0);
    for (int run = 0; run < c.monte_carlo_runs; ++run) {
      const auto& fr = f->runs[run];
      const auto& dr = d->runs[run];
      EXPECT_EQ(fr.records.size(), static_cast<std::size_t>(c.iterations));
      EXPECT_EQ(fr.batch_checksum, dr.batch_checksum);
      EXPECT_NE(fr.batch_checksum, 0u);
      // Both modes start from the same point.
      EXPECT_EQ(fr.records[0].rho, dr.records[0].rho);
      for (std::size_t i = 0; i < fr.records.size(); ++i) {
        EXPECT_EQ(fr.records[i].aux_solves_cum, static_cast<long long>(i) + 1);
        EXPECT_EQ(fr.records[i].updating_node, static_cast<NodeId>(i % 10));
        EXPECT_EQ(fr.records[i].t, static_cast<Index>(i) * c.N);
        EXPECT_GE(fr.records[i].rel_sq_error, 0.0);
        EXPECT_LE(fr.records[i].constraint_residual, 1e-8);
      }
    }
    EXPECT_GT(f->medse.front(), 0.1);
  }
}

TEST(RunExperiment, FixedBatchRegimeIsPairedToo) {
  auto c = small(ProblemKind::Tro);
  c.fresh_batches = false;
  const auto r = run_experiment(c);
  EXPECT_EQ(r.find(Mode::FDASF)->runs[0].batch_checksum, r.find(Mode::DASF)->runs[0].batch_checksum);
  EXPECT_LT(r.find(Mode::FDASF)->medse.back(), r.find(Mode::FDASF)->medse.front());
}

TEST(RunExperiment, ThreadCountDoesNotChangeOutput) {
  auto c = small(ProblemKind::Rtls);
  RunOptions one;
  one.threads = 1;
  RunOptions three;
  three.threads = 3;
  const auto a = run_experiment(c, one);
  const auto b = run_experiment(c, three);
  EXPECT_EQ(curves_csv(a), curves_csv(b));
  EXPECT_EQ(medse_csv(a), medse_csv(b));
  EXPECT_EQ(report_json(a), report_json(b));
}

TEST(RunExperiment, AdaptiveRampOffBehavesAsStationary) {
  auto c = small(ProblemKind::Tro);
  c.mode = ModeSelection::FDASF;
  c.fresh_batches = true;
  AdaptiveConfig ac;
  ac.knots = {{0.0, 0.0}, {1e9, 0.0}};
  c.adaptive = ac;
  const auto r = run_experiment(c);
  const auto& m = r.find(Mode::FDASF)->medse;
  ASSERT_EQ(m.size(), 30u);
  EXPECT_LT(m.back(), 0.1 * m.front());
}

// Without sampling noise the step in the mixture shows as a jump in the
// per-window error followed by a monotone decay back to the floor.
TEST(RunExperiment, AdaptiveStepShapeInExactStatistics) {
  auto c = table_config(ProblemKind::Tro);
  c.M = 20;
  c.N = 1000;
  c.iterations = 80;
  c.monte_carlo_runs = 5;
  c.mode = ModeSelection::FDASF;
  c.stats_mode = StatsMode::Exact;
  AdaptiveConfig ac;
  ac.knots = {{0.0, 0.0}, {40000.0, 0.0}, {40000.0, 1.0}, {80000.0, 1.0}};
  c.adaptive = ac;
  const auto r = run_experiment(c);
  const auto& m = r.find(Mode::FDASF)->medse;
  ASSERT_EQ(m.size(), 80u);
  const double before = m[39];
  EXPECT_GE(m[40], 10.0 * before);
  for (int i = 40; i < 50; ++i) EXPECT_LE(m[i + 1], m[i]) << i;
  EXPECT_LE(m.back(), 10.0 * before);
}

TEST(Writers, CsvSchemaAndFiles) {
  auto c = small(ProblemKind::Tro);
  c.iterations = 3;
  c.monte_carlo_runs = 2;
  const auto r = run_experiment(c);
  const std::string curves = curves_csv(r);
  std::istringstream in(curves);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kCurvesHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
  }
  EXPECT_EQ(rows, 2 * 2 * 3);
  // updating_node is 1-based on disk.
  EXPECT_NE(curves.find("fdasf,0,0,0,1,"), std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "fdasf_writer_test";
  std::filesystem::remove_all(dir);
  write_report_files(r, dir.string());
  for (const char* f : {"report.json", "curves.csv", "medse.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream med(dir / "medse.csv");
  std::getline(med, line);
  EXPECT_EQ(line, kMedseHeader);
  std::filesystem::remove_all(dir);
}

TEST(ConstraintCount, PerProblem) {
  EXPECT_EQ(constraint_count(ProblemKind::Tro, 2), 3);
  EXPECT_EQ(constraint_count(ProblemKind::Rtls, 1), 1);
  EXPECT_EQ(constraint_count(ProblemKind::Qol, 2), 0);
}

}  // namespace
}  // namespace fdasf

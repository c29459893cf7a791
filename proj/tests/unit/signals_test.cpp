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

#include "fdasf/signals.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace fdasf {
namespace {

SignalParams params(double r2, double n2, double pi2) {
  SignalParams p;
  p.source_var = r2;
  p.noise_var = n2;
  p.mixture_var = pi2;
  return p;
}

double rel_fro(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

TEST(DrawModel, DeterministicInSeed) {
  const auto a = draw_model(50, 2, 2, params(0.5, 0.1, 0.1), 9);
  const auto b = draw_model(50, 2, 2, params(0.5, 0.1, 0.1), 9);
  const auto c = draw_model(50, 2, 2, params(0.5, 0.1, 0.1), 10);
  EXPECT_EQ(a.mixture_s, b.mixture_s);
  EXPECT_EQ(a.mixture_r, b.mixture_r);
  EXPECT_NE(a.mixture_s, c.mixture_s);
}

TEST(DrawModel, MixtureVarianceMatches) {
  const auto m = draw_model(50, 5, 0, params(0.5, 0.2, 0.3), 1);
  const double mean = m.mixture_s.mean();
  const double var = (m.mixture_s.array() - mean).square().sum() / (m.mixture_s.size() - 1);
  EXPECT_NEAR(var, 0.3, 0.06);
  EXPECT_FALSE(m.has_v());
}

TEST(DrawModel, RejectsDegenerateParameters) {
  EXPECT_THROW(draw_model(50, 2, 0, params(0.5, 0.1, 0.0), 1), InvalidArgument);
  EXPECT_THROW(draw_model(50, 2, 0, params(0.0, 0.1, 0.1), 1), InvalidArgument);
  EXPECT_THROW(draw_model(50, 2, 0, params(0.5, -0.1, 0.1), 1), InvalidArgument);
  EXPECT_THROW(draw_model(50, 0, 0, params(0.5, 0.1, 0.1), 1), InvalidArgument);
  auto p = params(0.5, 0.1, 0.1);
  p.target_noise_var = -1.0;
  EXPECT_THROW(draw_model(50, 2, 0, p, 1), InvalidArgument);
}

TEST(SampleBatch, NoiselessSingleSourceOnFirstChannel) {
  SignalModel m;
  m.mixture_s = Matrix::Zero(4, 1);
  m.mixture_s(0, 0) = 1.0;
  m.mixture_r = Matrix(4, 0);
  m.noise_var = 0.0;
  m.target_noise_var = 0.0;
  const auto b = sample_batch(m, 0, 100, 3);
  EXPECT_EQ(b.y.rightCols(3).norm(), 0.0);
  EXPECT_GT(b.y.col(0).norm(), 0.0);
  EXPECT_TRUE(b.y.col(0).isApprox(b.d));
  EXPECT_EQ(b.v.size(), 0);
}

TEST(SampleBatch, EmpiricalCovarianceNearExactAtTableSize) {
  const auto m = draw_model(50, 1, 0, params(0.5, 0.2, 0.3), 4);
  const auto b = sample_batch(m, 0, 10000, 5);
  EXPECT_LT(rel_fro(empirical_stats(b).Ryy, exact_stats(m).Ryy), 0.05);
}

TEST(SampleBatch, MillionSamplesMatchClosedForm) {
  const auto m = draw_model(10, 2, 2, params(0.5, 0.1, 0.1), 6);
  const auto b = sample_batch(m, 0, 1000000, 7);
  const auto e = empirical_stats(b);
  const auto x = exact_stats(m);
  EXPECT_LT(rel_fro(e.Ryy, x.Ryy), 0.01);
  EXPECT_LT(rel_fro(e.Rvv, x.Rvv), 0.01);
  EXPECT_LT((e.ryd - x.ryd).norm() / x.ryd.norm(), 0.01);
  EXPECT_NEAR(e.rdd, x.rdd, 0.01 * x.rdd);
}

TEST(SampleBatch, ErrorDecaysWithSampleCount) {
  std::vector<double> medians;
  for (Index N : {1000, 10000, 100000}) {
    std::vector<double> errs;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto m = draw_model(10, 2, 0, params(0.5, 0.1, 0.1), 100 + s);
      errs.push_back(rel_fro(empirical_stats(sample_batch(m, 0, N, s)).Ryy, exact_stats(m).Ryy));
    }
    std::nth_element(errs.begin(), errs.begin() + 9, errs.end());
    medians.push_back(errs[9]);
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
  // O(1/sqrt(N)): a factor 10 in N is roughly a factor 3.16 in error.
  EXPECT_NEAR(medians[0] / medians[1], std::sqrt(10.0), 1.0);
  EXPECT_NEAR(medians[1] / medians[2], std::sqrt(10.0), 1.0);
}

TEST(SampleBatch, VMinusYIsTheRContribution) {
  const auto m = draw_model(6, 2, 3, params(0.5, 0.1, 0.1), 8);
  const auto b = sample_batch(m, 0, 50, 9);
  // Column space of (v - y)^T lies in span(Pi_r): residual after projection vanishes.
  const Matrix diff = (b.v - b.y).transpose();
  const Matrix coeff = m.mixture_r.colPivHouseholderQr().solve(diff);
  EXPECT_LT((m.mixture_r * coeff - diff).norm(), 1e-12 * diff.norm());
}

TEST(SampleBatch, OverlappingWindowsAgree) {
  const auto m = draw_model(5, 2, 1, params(0.5, 0.1, 0.1), 2);
  const auto a = sample_batch(m, 0, 100, 11);
  const auto b = sample_batch(m, 40, 100, 11);
  EXPECT_EQ(a.y.bottomRows(60), b.y.topRows(60));
  EXPECT_EQ(a.v.bottomRows(60), b.v.topRows(60));
  EXPECT_EQ(a.d.tail(60), b.d.head(60));
}

TEST(SampleBatch, NodeSlicesFollowChannelOffsets) {
  const Topology t(3, {{0, 1}, {1, 2}}, {1, 2, 3});
  const auto m = draw_model(6, 1, 0, params(0.5, 0.1, 0.1), 2);
  const auto b = sample_batch(m, 0, 10, 1);
  EXPECT_EQ(Matrix(b.node_y(t, 2)), Matrix(b.y.rightCols(3)));
  EXPECT_EQ(Matrix(b.node_y(t, 1)), Matrix(b.y.middleCols(1, 2)));
}

TEST(ExactStats, PureNoiseAndRankOne) {
  SignalModel m;
  m.mixture_s = Matrix::Zero(3, 1);
  m.mixture_r = Matrix(3, 0);
  m.noise_var = 0.2;
  EXPECT_TRUE(exact_stats(m).Ryy.isApprox(0.2 * Matrix::Identity(3, 3)));
  m.mixture_s(0, 0) = 1.0;
  m.source_var = 0.5;
  Matrix expected = 0.2 * Matrix::Identity(3, 3);
  expected(0, 0) = 0.7;
  EXPECT_LT((exact_stats(m).Ryy - expected).norm(), 1e-15);
}

TEST(ExactStats, SymmetricPositiveDefinite) {
  const auto m = draw_model(20, 2, 2, params(0.5, 0.1, 0.1), 3);
  const auto s = exact_stats(m);
  EXPECT_LT((s.Ryy - s.Ryy.transpose()).norm(), 1e-12);
  EXPECT_LT((s.Rvv - s.Rvv.transpose()).norm(), 1e-12);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(s.Ryy).eigenvalues().minCoeff(), 0.0);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(s.Rvv).eigenvalues().minCoeff(), 0.0);
}

TEST(Adaptive, MixtureFollowsTheRamp) {
  auto m = draw_adaptive_model(8, 2, 2, params(0.5, 0.1, 0.1), 1e-4,
                               RampProfile({{0.0, 0.0}, {10.0, 1.0}}), 5);
  const Matrix base = m.mixture_s;
  const Matrix delta = m.adaptive->delta_s;
  EXPECT_TRUE(mixture_at(m, 0.0).first.isApprox(base));
  EXPECT_TRUE(mixture_at(m, 10.0).first.isApprox(base + delta));
  EXPECT_TRUE(mixture_at(m, 5.0).first.isApprox(base + 0.5 * delta));
  EXPECT_TRUE(mixture_at(m, 50.0).first.isApprox(base + delta));
}

TEST(Adaptive, RampOffEqualsStationaryModel) {
  const auto st = draw_model(8, 2, 2, params(0.5, 0.1, 0.1), 5);
  auto ad = draw_adaptive_model(8, 2, 2, params(0.5, 0.1, 0.1), 1e-4,
                                RampProfile({{0.0, 0.0}, {100.0, 0.0}}), 5);
  EXPECT_EQ(ad.mixture_s, st.mixture_s);
  const auto a = sample_batch(st, 0, 30, 4);
  const auto b = sample_batch(ad, 0, 30, 4);
  EXPECT_LT((a.y - b.y).norm(), 1e-14);
  EXPECT_LT((a.v - b.v).norm(), 1e-14);
}

TEST(RampProfile, StepThenRampShape) {
  const auto r = RampProfile::step_then_ramp(100.0, 200.0, 50.0);
  EXPECT_EQ(r(50.0), 0.0);
  EXPECT_EQ(r(100.0), 1.0);
  EXPECT_EQ(r(150.0), 1.0);
  EXPECT_NEAR(r(225.0), 0.5, 1e-15);
  EXPECT_EQ(r(300.0), 0.0);
  EXPECT_THROW(RampProfile({{0.0, 0.0}, {1.0, 2.0}}), InvalidArgument);
  EXPECT_THROW(RampProfile({{1.0, 0.0}, {0.0, 1.0}}), InvalidArgument);
}

TEST(SignalModelJson, RoundTrip) {
  auto m = draw_adaptive_model(4, 2, 1, params(0.5, 0.1, 0.1), 1e-4,
                               RampProfile::step_then_ramp(10, 20, 5), 5);
  const auto back = signal_model_from_json(signal_model_to_json(m));
  EXPECT_EQ(back.mixture_s, m.mixture_s);
  EXPECT_EQ(back.mixture_r, m.mixture_r);
  ASSERT_TRUE(back.adaptive.has_value());
  EXPECT_EQ(back.adaptive->delta_s, m.adaptive->delta_s);
  EXPECT_EQ(back.adaptive->ramp(22.5), m.adaptive->ramp(22.5));
  EXPECT_THROW(signal_model_from_json("{}"), Error);
}

}  // namespace
}  // namespace fdasf

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

#include "fdasf/netgraph.hpp"
#include "fdasf/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdasf {

/// Piecewise-linear profile p(t) with values in [0, 1]. Two knots sharing a
/// time encode a step: the later knot wins from that time on. Outside the
/// knot range the profile is held constant.
class RampProfile {
 public:
  struct Knot {
    double t = 0.0;
    double value = 0.0;
  };

  RampProfile() = default;
  explicit RampProfile(std::vector<Knot> knots);

  double operator()(double t) const;
  const std::vector<Knot>& knots() const { return knots_; }
  bool empty() const { return knots_.empty(); }

  /// Flat, then a step to 1 at `step_time`, held until `ramp_start`, then a
  /// linear ramp back down to 0 over `ramp_length` samples.
  static RampProfile step_then_ramp(double step_time, double ramp_start, double ramp_length);

 private:
  std::vector<Knot> knots_;
};

struct SignalParams {
  double source_var = 0.5;
  double noise_var = 0.1;
  double mixture_var = 0.1;
  double target_noise_var = 0.02;
};

/// Time variation of the mixture matrices:
/// Pi(t) = Pi_0 (1 - p(t)) + (Pi_0 + Delta) p(t).
struct AdaptiveMixture {
  Matrix delta_s;
  Matrix delta_r;
  RampProfile ramp;
};

/// y(t) = Pi_s(t) s(t) + n(t),  v(t) = Pi_r(t) r(t) + y(t),  d(t) = s_0(t) + w(t).
///
/// s, r have i.i.d. N(0, source_var) entries, n has N(0, noise_var) and
/// w ~ N(0, target_noise_var). In adaptive mode `mixture_s` / `mixture_r` hold
/// the base matrices Pi_{s,0}, Pi_{r,0}.
struct SignalModel {
  Matrix mixture_s;  // M x S
  Matrix mixture_r;  // M x R, R may be 0 (no v signal)
  double source_var = 0.5;
  double noise_var = 0.1;
  double mixture_var = 0.1;
  double target_noise_var = 0.02;
  std::optional<AdaptiveMixture> adaptive;

  Index channels() const { return mixture_s.rows(); }
  Index s_sources() const { return mixture_s.cols(); }
  Index r_sources() const { return mixture_r.cols(); }
  bool has_v() const { return mixture_r.cols() > 0; }
};

/// Mixture entries i.i.d. N(0, mixture_var); deterministic in the seed.
SignalModel draw_model(Index channels, Index s_sources, Index r_sources,
                       const SignalParams& params, std::uint64_t seed);

/// draw_model plus perturbations Delta_s, Delta_r with N(0, delta_var) entries.
SignalModel draw_adaptive_model(Index channels, Index s_sources, Index r_sources,
                                const SignalParams& params, double delta_var,
                                RampProfile ramp, std::uint64_t seed);

/// (Pi_s(t), Pi_r(t)); the static matrices when the model is not adaptive.
std::pair<Matrix, Matrix> mixture_at(const SignalModel& model, double t);

/// N consecutive time samples starting at t0; rows are samples. v is empty
/// when the model has no r-sources. Sample t depends only on (seed, t).
struct SampleBatch {
  Index t0 = 0;
  Matrix y;  // N x M
  Matrix v;  // N x M or empty
  Vector d;  // N

  Index samples() const { return y.rows(); }
  /// Columns of node k (contiguous, node order).
  auto node_y(const Topology& topology, NodeId k) const {
    return y.middleCols(topology.channel_offset(k), topology.channels(k));
  }
  auto node_v(const Topology& topology, NodeId k) const {
    return v.middleCols(topology.channel_offset(k), topology.channels(k));
  }
};

SampleBatch sample_batch(const SignalModel& model, Index t0, Index samples, std::uint64_t seed);

/// Closed-form second-order statistics of the model at time t.
struct ExactStats {
  Matrix Ryy;
  Matrix Rvv;  // empty when the model has no r-sources
  Vector ryd;
  double rdd = 0.0;
};

ExactStats exact_stats(const SignalModel& model, double t = 0.0);

/// Sample averages (1/N) sum y y^T etc. over a batch.
ExactStats empirical_stats(const SampleBatch& batch);

/// Matrices as row-major nested arrays.
std::string signal_model_to_json(const SignalModel& model);
SignalModel signal_model_from_json(std::string_view text);

}  // namespace fdasf

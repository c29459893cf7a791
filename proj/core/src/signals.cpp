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

#include "fdasf/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace fdasf {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Matrix out(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

void check_params(Index channels, Index s_sources, Index r_sources, const SignalParams& p) {
  if (channels < 1 || s_sources < 1 || r_sources < 0) {
    throw InvalidArgument("signal model needs M >= 1, S >= 1 and R >= 0");
  }
  if (!(p.source_var > 0.0) || !(p.noise_var > 0.0) || !(p.mixture_var > 0.0)) {
    throw InvalidArgument("signal model variances must be strictly positive");
  }
  if (!(p.target_noise_var >= 0.0)) {
    throw InvalidArgument("target noise variance must be non-negative");
  }
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& rows, Index expected_rows) {
  const Index r = static_cast<Index>(rows.size());
  if (r == 0) return Matrix(expected_rows, 0);
  const Index c = static_cast<Index>(rows[0].size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != c) throw InvalidArgument("ragged matrix in JSON");
    for (Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

}  // namespace

RampProfile::RampProfile(std::vector<Knot> knots) : knots_(std::move(knots)) {
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i].value >= 0.0 && knots_[i].value <= 1.0)) {
      throw InvalidArgument("ramp values must lie in [0, 1]");
    }
    if (i > 0 && knots_[i].t < knots_[i - 1].t) {
      throw InvalidArgument("ramp knots must be ordered in time");
    }
  }
}

double RampProfile::operator()(double t) const {
  if (knots_.empty()) return 0.0;
  if (t < knots_.front().t) return knots_.front().value;
  // Last knot with knot.t <= t; equal times resolve to the later knot.
  const auto after = std::upper_bound(knots_.begin(), knots_.end(), t,
                                      [](double x, const Knot& k) { return x < k.t; });
  const auto& left = *(after - 1);
  if (after == knots_.end()) return left.value;
  const auto& right = *after;
  const double span = right.t - left.t;
  const double w = (t - left.t) / span;
  return left.value + w * (right.value - left.value);
}

RampProfile RampProfile::step_then_ramp(double step_time, double ramp_start, double ramp_length) {
  return RampProfile({{0.0, 0.0},
                      {step_time, 0.0},
                      {step_time, 1.0},
                      {ramp_start, 1.0},
                      {ramp_start + ramp_length, 0.0}});
}

SignalModel draw_model(Index channels, Index s_sources, Index r_sources,
                       const SignalParams& params, std::uint64_t seed) {
  check_params(channels, s_sources, r_sources, params);
  std::mt19937_64 rng(seed);
  SignalModel model;
  model.mixture_s = gaussian_matrix(channels, s_sources, params.mixture_var, rng);
  model.mixture_r = gaussian_matrix(channels, r_sources, params.mixture_var, rng);
  model.source_var = params.source_var;
  model.noise_var = params.noise_var;
  model.mixture_var = params.mixture_var;
  model.target_noise_var = params.target_noise_var;
  return model;
}

SignalModel draw_adaptive_model(Index channels, Index s_sources, Index r_sources,
                                const SignalParams& params, double delta_var,
                                RampProfile ramp, std::uint64_t seed) {
  if (!(delta_var > 0.0)) throw InvalidArgument("perturbation variance must be positive");
  SignalModel model = draw_model(channels, s_sources, r_sources, params, seed);
  std::mt19937_64 rng(derive_seed(seed, 0xADA));
  AdaptiveMixture adaptive;
  adaptive.delta_s = gaussian_matrix(channels, s_sources, delta_var, rng);
  adaptive.delta_r = gaussian_matrix(channels, r_sources, delta_var, rng);
  adaptive.ramp = std::move(ramp);
  model.adaptive = std::move(adaptive);
  return model;
}

std::pair<Matrix, Matrix> mixture_at(const SignalModel& model, double t) {
  if (!model.adaptive) return {model.mixture_s, model.mixture_r};
  const double p = model.adaptive->ramp(t);
  return {model.mixture_s * (1.0 - p) + (model.mixture_s + model.adaptive->delta_s) * p,
          model.mixture_r * (1.0 - p) + (model.mixture_r + model.adaptive->delta_r) * p};
}

SampleBatch sample_batch(const SignalModel& model, Index t0, Index samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("a sample batch needs N >= 1");
  const Index M = model.channels();
  const Index S = model.s_sources();
  const Index R = model.r_sources();
  const double s_std = std::sqrt(model.source_var);
  const double n_std = std::sqrt(model.noise_var);
  const double w_std = std::sqrt(model.target_noise_var);

  Matrix s(samples, S);
  Matrix r(samples, R);
  Matrix noise(samples, M);
  Vector w(samples);
  for (Index i = 0; i < samples; ++i) {
    const auto t = static_cast<std::uint64_t>(t0 + i);
    NormalStream stream(derive_seed(seed, t));
    for (Index j = 0; j < S; ++j) s(i, j) = s_std * stream.next();
    for (Index j = 0; j < R; ++j) r(i, j) = s_std * stream.next();
    for (Index j = 0; j < M; ++j) noise(i, j) = n_std * stream.next();
    w(i) = w_std * stream.next();
  }

  SampleBatch batch;
  batch.t0 = t0;
  batch.y = noise;
  batch.y.noalias() += s * model.mixture_s.transpose();
  Matrix r_part;
  if (R > 0) r_part = r * model.mixture_r.transpose();
  if (model.adaptive) {
    Vector p(samples);
    for (Index i = 0; i < samples; ++i) p(i) = model.adaptive->ramp(static_cast<double>(t0 + i));
    batch.y.noalias() += p.asDiagonal() * (s * model.adaptive->delta_s.transpose());
    if (R > 0) r_part.noalias() += p.asDiagonal() * (r * model.adaptive->delta_r.transpose());
  }
  if (R > 0) batch.v = r_part + batch.y;
  batch.d = s.col(0) + w;
  return batch;
}

ExactStats exact_stats(const SignalModel& model, double t) {
  const auto [pi_s, pi_r] = mixture_at(model, t);
  const Index M = model.channels();
  ExactStats stats;
  stats.Ryy = model.source_var * (pi_s * pi_s.transpose());
  stats.Ryy.diagonal().array() += model.noise_var;
  stats.Ryy = 0.5 * (stats.Ryy + stats.Ryy.transpose()).eval();
  if (pi_r.cols() > 0) {
    stats.Rvv = stats.Ryy + model.source_var * (pi_r * pi_r.transpose());
    stats.Rvv = 0.5 * (stats.Rvv + stats.Rvv.transpose()).eval();
  }
  stats.ryd = model.source_var * pi_s.col(0);
  stats.rdd = model.source_var + model.target_noise_var;
  (void)M;
  return stats;
}

ExactStats empirical_stats(const SampleBatch& batch) {
  const double inv_n = 1.0 / static_cast<double>(batch.samples());
  ExactStats stats;
  stats.Ryy.noalias() = inv_n * (batch.y.transpose() * batch.y);
  if (batch.v.size() > 0) stats.Rvv.noalias() = inv_n * (batch.v.transpose() * batch.v);
  stats.ryd.noalias() = inv_n * (batch.y.transpose() * batch.d);
  stats.rdd = inv_n * batch.d.squaredNorm();
  return stats;
}

std::string signal_model_to_json(const SignalModel& model) {
  nlohmann::json doc;
  doc["mixture_s"] = matrix_to_json(model.mixture_s);
  doc["mixture_r"] = matrix_to_json(model.mixture_r);
  doc["source_var"] = model.source_var;
  doc["noise_var"] = model.noise_var;
  doc["mixture_var"] = model.mixture_var;
  doc["target_noise_var"] = model.target_noise_var;
  if (model.adaptive) {
    nlohmann::json knots = nlohmann::json::array();
    for (const auto& k : model.adaptive->ramp.knots()) knots.push_back({k.t, k.value});
    doc["adaptive"] = {{"delta_s", matrix_to_json(model.adaptive->delta_s)},
                       {"delta_r", matrix_to_json(model.adaptive->delta_r)},
                       {"ramp", std::move(knots)}};
  }
  return doc.dump();
}

SignalModel signal_model_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    SignalModel model;
    model.mixture_s = matrix_from_json(doc.at("mixture_s"), 0);
    model.mixture_r = matrix_from_json(doc.at("mixture_r"), model.mixture_s.rows());
    model.source_var = doc.at("source_var").get<double>();
    model.noise_var = doc.at("noise_var").get<double>();
    model.mixture_var = doc.at("mixture_var").get<double>();
    model.target_noise_var = doc.value("target_noise_var", 0.02);
    if (doc.contains("adaptive") && !doc["adaptive"].is_null()) {
      const auto& a = doc["adaptive"];
      AdaptiveMixture adaptive;
      adaptive.delta_s = matrix_from_json(a.at("delta_s"), model.mixture_s.rows());
      adaptive.delta_r = matrix_from_json(a.at("delta_r"), model.mixture_s.rows());
      std::vector<RampProfile::Knot> knots;
      for (const auto& k : a.at("ramp")) knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
      adaptive.ramp = RampProfile(std::move(knots));
      model.adaptive = std::move(adaptive);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("signal model JSON: ") + e.what());
  }
}

}  // namespace fdasf

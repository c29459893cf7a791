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

#include "fdasf/problems.hpp"

#include "fdasf/kernels.hpp"

#include <cmath>
#include <string>

namespace fdasf {

namespace {

double quad_trace(const Matrix& X, const Matrix& R) { return (X.array() * (R * X).array()).sum(); }

const Matrix& fixed_at(const ProblemData& data, std::size_t j, const char* who) {
  if (data.fixed.size() <= j) {
    throw InvalidArgument(std::string(who) + ": missing deterministic matrix #" + std::to_string(j));
  }
  return data.fixed[j];
}

void check_rows(const Matrix& X, const ProblemData& data, Index Q, const char* who) {
  if (X.rows() != data.dim() || X.cols() != Q) {
    throw InvalidArgument(std::string(who) + ": variable has shape " + std::to_string(X.rows()) +
                          "x" + std::to_string(X.cols()) + ", expected " +
                          std::to_string(data.dim()) + "x" + std::to_string(Q));
  }
}

/// F with F F^T = S for symmetric PSD S.
Matrix gram_factor(const Matrix& S) {
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

void require_symmetric(const Matrix& S, const char* what, double psd_floor) {
  if (S.rows() != S.cols()) throw InvalidArgument(std::string(what) + " must be square");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument(std::string(what) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < psd_floor) {
    throw InvalidArgument(std::string(what) + (psd_floor > 0.0 ? " must be positive definite"
                                                               : " must be positive semidefinite"));
  }
}

Matrix metric_orthonormalize(const Matrix& raw, const Matrix& C) {
  Eigen::LLT<Matrix> llt(0.5 * (C + C.transpose()));
  if (llt.info() != Eigen::Success) throw SolverError("tro: metric is not positive definite");
  const Matrix Y = llt.matrixU() * raw;
  Eigen::HouseholderQR<Matrix> qr(Y);
  Matrix Qf = qr.householderQ() * Matrix::Identity(Y.rows(), Y.cols());
  // Keep the orientation of the raw draw (positive R diagonal).
  const Matrix R = qr.matrixQR().topRows(Y.cols()).triangularView<Eigen::Upper>();
  for (Index j = 0; j < Qf.cols(); ++j) {
    if (R(j, j) < 0.0) Qf.col(j) = -Qf.col(j);
  }
  return llt.matrixU().solve(Qf);
}

}  // namespace

// ---------------------------------------------------------------------------
// TRO

TroProblem::TroProblem(Index Q) : Q_(Q) {
  if (Q < 1) throw InvalidArgument("tro: Q must be positive");
}

Matrix TroProblem::metric(const ProblemData& data) {
  const Matrix& B = fixed_at(data, 0, "tro");
  return B * B.transpose();
}

double TroProblem::f1(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, Q_, "tro");
  return -quad_trace(X, data.Rvv);
}

double TroProblem::f2(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, Q_, "tro");
  return quad_trace(X, data.Ryy);
}

Matrix TroProblem::grad_f1(const Matrix& X, const ProblemData& data) const {
  return -2.0 * (data.Rvv * X);
}

Matrix TroProblem::grad_f2(const Matrix& X, const ProblemData& data) const {
  return 2.0 * (data.Ryy * X);
}

std::vector<ConstraintKind> TroProblem::constraint_kinds() const {
  return std::vector<ConstraintKind>(static_cast<std::size_t>(Q_ * (Q_ + 1) / 2),
                                     ConstraintKind::Equality);
}

Vector TroProblem::constraint_values(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, Q_, "tro");
  const Matrix BX = fixed_at(data, 0, "tro").transpose() * X;
  const Matrix P = BX.transpose() * BX - Matrix::Identity(Q_, Q_);
  Vector h(Q_ * (Q_ + 1) / 2);
  Index j = 0;
  for (Index b = 0; b < Q_; ++b) {
    for (Index a = 0; a <= b; ++a) h(j++) = P(a, b);
  }
  return h;
}

std::vector<Matrix> TroProblem::constraint_gradients(const Matrix& X,
                                                     const ProblemData& data) const {
  const Matrix CX = metric(data) * X;
  std::vector<Matrix> grads;
  for (Index b = 0; b < Q_; ++b) {
    for (Index a = 0; a <= b; ++a) {
      Matrix g = Matrix::Zero(X.rows(), Q_);
      g.col(a) += CX.col(b);
      g.col(b) += CX.col(a);
      grads.push_back(std::move(g));
    }
  }
  return grads;
}

double TroProblem::constraint_violation(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, Q_, "tro");
  const Matrix BX = fixed_at(data, 0, "tro").transpose() * X;
  return (BX.transpose() * BX - Matrix::Identity(Q_, Q_)).norm();
}

AuxResult TroProblem::solve_auxiliary(double rho, const ProblemData& data, const Matrix&) const {
  // min -tr(X^T Rvv X) - rho tr(X^T Ryy X)  <=>  max tr(X^T (Rvv + rho Ryy) X).
  const Matrix S = data.Rvv + rho * data.Ryy;
  TopEigen top = gevd_top_q(S, metric(data), Q_);
  AuxResult out;
  out.objective = -top.values.sum();
  out.X = std::move(top.vectors);
  return out;
}

Matrix TroProblem::select_solution(const Matrix& X, const Matrix& reference) const {
  if (reference.rows() != X.rows() || reference.cols() != X.cols()) return X;
  Matrix out = X;
  for (Index j = 0; j < X.cols(); ++j) {
    const double dot = X.col(j).dot(reference.col(j));
    const double scale = X.col(j).norm() * reference.col(j).norm();
    if (dot < -1e-12 * scale) out.col(j) = -out.col(j);
  }
  return out;
}

Matrix TroProblem::make_feasible(const Matrix& raw, const ProblemData& data) const {
  check_rows(raw, data, Q_, "tro");
  return metric_orthonormalize(raw, metric(data));
}

// ---------------------------------------------------------------------------
// RTLS

Matrix RtlsProblem::identity_gram(const ProblemData& data) {
  const Matrix& B = fixed_at(data, 0, "rtls");
  return B * B.transpose();
}

Matrix RtlsProblem::l_gram(const ProblemData& data) {
  const Matrix& B = fixed_at(data, 1, "rtls");
  return B * B.transpose();
}

double RtlsProblem::f1(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, 1, "rtls");
  const auto x = X.col(0);
  return x.dot(data.Ryy * x) - 2.0 * x.dot(data.ryd) + data.rdd;
}

double RtlsProblem::f2(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, 1, "rtls");
  return 1.0 + (fixed_at(data, 0, "rtls").transpose() * X.col(0)).squaredNorm();
}

Matrix RtlsProblem::grad_f1(const Matrix& X, const ProblemData& data) const {
  return 2.0 * (data.Ryy * X.col(0) - data.ryd);
}

Matrix RtlsProblem::grad_f2(const Matrix& X, const ProblemData& data) const {
  return 2.0 * (identity_gram(data) * X.col(0));
}

std::vector<ConstraintKind> RtlsProblem::constraint_kinds() const {
  return {ConstraintKind::Inequality};
}

Vector RtlsProblem::constraint_values(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, 1, "rtls");
  Vector h(1);
  h(0) = (fixed_at(data, 1, "rtls").transpose() * X.col(0)).squaredNorm() - 1.0;
  return h;
}

std::vector<Matrix> RtlsProblem::constraint_gradients(const Matrix& X,
                                                      const ProblemData& data) const {
  return {2.0 * (l_gram(data) * X.col(0))};
}

AuxResult RtlsProblem::solve_auxiliary(double rho, const ProblemData& data, const Matrix&) const {
  const Matrix H = data.Ryy - rho * identity_gram(data);
  const GtrsResult sol = gtrs_solve(H, data.ryd, l_gram(data), 1.0);
  AuxResult out;
  out.X = sol.x;
  out.objective = aux_objective(*this, out.X, rho, data);
  out.iterations = sol.iterations;
  out.residual = sol.kkt_residual;
  return out;
}

Matrix RtlsProblem::make_feasible(const Matrix& raw, const ProblemData& data) const {
  check_rows(raw, data, 1, "rtls");
  const double level = (fixed_at(data, 1, "rtls").transpose() * raw.col(0)).squaredNorm();
  if (!(level > 0.0)) throw InvalidArgument("rtls: cannot scale a zero vector into the constraint");
  return raw * std::sqrt(0.5 / level);
}

// ---------------------------------------------------------------------------
// QoL

QolProblem::QolProblem(Index Q, double c) : Q_(Q), c_(c) {
  if (Q < 1) throw InvalidArgument("qol: Q must be positive");
}

double QolProblem::f1(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, Q_, "qol");
  return quad_trace(X, data.Ryy) + (X.array() * fixed_at(data, 0, "qol").array()).sum();
}

double QolProblem::f2(const Matrix& X, const ProblemData& data) const {
  check_rows(X, data, Q_, "qol");
  return (X.array() * fixed_at(data, 1, "qol").array()).sum() + c_;
}

Matrix QolProblem::grad_f1(const Matrix& X, const ProblemData& data) const {
  return 2.0 * (data.Ryy * X) + fixed_at(data, 0, "qol");
}

Matrix QolProblem::grad_f2(const Matrix&, const ProblemData& data) const {
  return fixed_at(data, 1, "qol");
}

AuxResult QolProblem::solve_auxiliary(double rho, const ProblemData& data, const Matrix&) const {
  Eigen::LLT<Matrix> llt(data.Ryy);
  if (llt.info() != Eigen::Success) throw SolverError("qol: covariance is not positive definite");
  AuxResult out;
  out.X = 0.5 * llt.solve(rho * fixed_at(data, 1, "qol") - fixed_at(data, 0, "qol"));
  out.objective = aux_objective(*this, out.X, rho, data);
  return out;
}

Matrix QolProblem::make_feasible(const Matrix& raw, const ProblemData& data) const {
  check_rows(raw, data, Q_, "qol");
  Matrix X = raw;
  double t = (X.array() * fixed_at(data, 1, "qol").array()).sum();
  if (t < 0.0) {
    X = -X;
    t = -t;
  }
  if (t + c_ > 0.0) return X;
  if (!(t > 0.0)) throw InvalidArgument("qol: raw point is orthogonal to B");
  return X * ((1.0 - c_) / t);
}

// ---------------------------------------------------------------------------
// Typed views

ProblemData to_problem_data(const TroData& data) {
  ProblemData out;
  out.Ryy = data.Ryy;
  out.Rvv = data.Rvv;
  out.fixed = {gram_factor(data.metric)};
  return out;
}

ProblemData to_problem_data(const RtlsData& data) {
  ProblemData out;
  out.Ryy = data.Ryy;
  out.ryd = data.ryd;
  out.rdd = data.rdd;
  out.fixed = {gram_factor(data.identity_gram), gram_factor(data.L_gram)};
  return out;
}

ProblemData to_problem_data(const QolData& data) {
  ProblemData out;
  out.Ryy = data.Ryy;
  out.fixed = {data.A, data.B};
  return out;
}

void validate(const TroData& data, Index Q) {
  require_symmetric(data.Rvv, "tro: Rvv", 1e-12);
  require_symmetric(data.Ryy, "tro: Ryy", 1e-12);
  require_symmetric(data.metric, "tro: metric", 1e-12);
  if (data.Rvv.rows() != data.Ryy.rows() || data.metric.rows() != data.Ryy.rows()) {
    throw InvalidArgument("tro: matrix sizes differ");
  }
  if (Q < 1 || Q > data.Ryy.rows()) throw InvalidArgument("tro: need 1 <= Q <= dim");
}

void validate(const RtlsData& data) {
  require_symmetric(data.Ryy, "rtls: Ryy", 1e-12);
  require_symmetric(data.identity_gram, "rtls: identity gram", -1e-12);
  require_symmetric(data.L_gram, "rtls: L gram", -1e-12);
  const Index n = data.Ryy.rows();
  if (data.ryd.size() != n || data.identity_gram.rows() != n || data.L_gram.rows() != n) {
    throw InvalidArgument("rtls: matrix sizes differ");
  }
  if (!(data.rdd > 0.0)) throw InvalidArgument("rtls: rdd must be positive");
}

void validate(const QolData& data) {
  require_symmetric(data.Ryy, "qol: Ryy", 1e-12);
  if (data.A.rows() != data.Ryy.rows() || data.B.rows() != data.Ryy.rows() ||
      data.A.cols() != data.B.cols()) {
    throw InvalidArgument("qol: matrix sizes differ");
  }
  if (!qol_feasible(data.Ryy, data.A, data.B, data.c)) {
    throw InvalidArgument("qol: offset c violates the feasibility condition");
  }
}

// ---------------------------------------------------------------------------
// QoL closed form

QolClosedForm qol_closed_form(const Matrix& Ryy, const Matrix& A, const Matrix& B, double c) {
  Eigen::LLT<Matrix> llt(Ryy);
  if (llt.info() != Eigen::Success) throw SolverError("qol: covariance is not positive definite");
  const Matrix RiA = llt.solve(A);
  const Matrix RiB = llt.solve(B);
  QolClosedForm out;
  out.a = (A.array() * RiA.array()).sum();
  out.b = (A.array() * RiB.array()).sum();
  out.e = (B.array() * RiB.array()).sum();
  const double disc = (out.b - 2.0 * c) * (out.b - 2.0 * c) - out.a * out.e;
  if (disc < 0.0) throw InvalidArgument("qol: offset c makes the problem infeasible");
  out.rho = ((out.b - 2.0 * c) + std::sqrt(disc)) / out.e;
  out.mu = -out.rho;
  out.X = -0.5 * (RiA + out.mu * RiB);
  return out;
}

double qol_default_offset(const Matrix& Ryy, const Matrix& A, const Matrix& B) {
  Eigen::LLT<Matrix> llt(Ryy);
  if (llt.info() != Eigen::Success) throw SolverError("qol: covariance is not positive definite");
  const double a = (A.array() * llt.solve(A).array()).sum();
  const double b = (A.array() * llt.solve(B).array()).sum();
  const double e = (B.array() * llt.solve(B).array()).sum();
  return 0.5 * b + std::sqrt(a * e);
}

bool qol_feasible(const Matrix& Ryy, const Matrix& A, const Matrix& B, double c) {
  Eigen::LLT<Matrix> llt(Ryy);
  if (llt.info() != Eigen::Success) return false;
  const double a = (A.array() * llt.solve(A).array()).sum();
  const double b = (A.array() * llt.solve(B).array()).sum();
  const double e = (B.array() * llt.solve(B).array()).sum();
  const double root = std::sqrt(a * e);
  return 2.0 * c >= b + root || 2.0 * c <= b - root;
}

std::unique_ptr<FractionalProblem> tro_problem(Index Q) { return std::make_unique<TroProblem>(Q); }
std::unique_ptr<FractionalProblem> rtls_problem() { return std::make_unique<RtlsProblem>(); }
std::unique_ptr<FractionalProblem> qol_problem(Index Q, double c) {
  return std::make_unique<QolProblem>(Q, c);
}

}  // namespace fdasf

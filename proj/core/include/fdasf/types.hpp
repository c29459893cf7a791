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

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fdasf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Zero-based node identifier. External formats (JSON, CSV) use 1-based ids.
using NodeId = int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or configuration violation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical kernel or auxiliary solver could not produce a solution.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// An iterate left the feasible set (e.g. a non-positive denominator).
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace fdasf

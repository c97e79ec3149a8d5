// Copyright 2026 The hybnb Authors
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

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>

namespace hybnb {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Discrete-mode / discrete-input handles; indices into the declared label
/// lists of a system definition. Declaration order is significant (tie
/// breaking, file formats).
using ModeId = int;
using InputId = int;

inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

/// Default classification tolerance for feasibility-style decisions
/// (set membership, emptiness). Solver residual tolerances are one order
/// tighter, comparisons in acceptance checks one order looser.
inline constexpr Scalar kFeasTol = 1e-6;

/// Contract violations by the caller (bad labels, wrong store kind, ...).
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

/// Malformed system definitions / instance files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hybnb

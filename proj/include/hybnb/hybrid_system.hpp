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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hybnb/polyhedron.hpp"
#include "hybnb/types.hpp"

namespace hybnb {

/// Quadratic stage cost c(x, u) = x'Qx x + u'Qu u + lx'x + lu'u + k,
/// attached to the mode the step starts from.
struct QuadraticStageCost {
  Matrix quad_x;  // n_x x n_x, PSD
  Matrix quad_u;  // n_u x n_u, PSD
  Vector lin_x;
  Vector lin_u;
  Scalar constant = 0;

  Scalar eval(const Vector& x, const Vector& u) const {
    return x.dot(quad_x * x) + u.dot(quad_u * u) + lin_x.dot(x) + lin_u.dot(u) + constant;
  }
};

/// One labeled transition: from mode q under discrete input v, the continuous
/// state evolves as x' = A x + B u + c. The continuous input must lie in
/// `input_set` and the successor state in `guard_next` (which contains the
/// state-domain rows by construction).
struct TransitionRule {
  ModeId from = -1;
  InputId input = -1;
  ModeId to = -1;
  Matrix dyn_A;
  Matrix dyn_B;
  Vector dyn_c;
  Polyhedron guard_next;  // on x'
  Polyhedron input_set;   // on u
};

struct Diagnostic {
  std::string message;
};

/// Deterministic discrete-time hybrid control system: finite modes and
/// discrete inputs, affine per-transition continuous dynamics with polyhedral
/// guards, quadratic per-mode stage costs and a target (modes, set) pair.
/// Immutable after construction; safe for concurrent reads.
class HybridSystem {
 public:
  HybridSystem(std::vector<std::string> mode_names, std::vector<std::string> input_names,
               int state_dim, int input_dim, Polyhedron state_domain,
               std::vector<TransitionRule> rules, std::vector<QuadraticStageCost> stage_costs,
               std::vector<ModeId> target_modes, Polyhedron target_set);

  int num_modes() const { return static_cast<int>(mode_names_.size()); }
  int num_inputs() const { return static_cast<int>(input_names_.size()); }
  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }

  const std::vector<std::string>& mode_names() const { return mode_names_; }
  const std::vector<std::string>& input_names() const { return input_names_; }
  const std::string& mode_name(ModeId q) const { return mode_names_.at(q); }
  const std::string& input_name(InputId v) const { return input_names_.at(v); }
  ModeId mode_id(const std::string& name) const;
  InputId input_id(const std::string& name) const;

  const Polyhedron& state_domain() const { return domain_; }
  const std::vector<TransitionRule>& rules() const { return rules_; }
  const QuadraticStageCost& stage_cost(ModeId q) const { return costs_.at(q); }
  const std::vector<ModeId>& target_modes() const { return target_modes_; }
  const Polyhedron& target_set() const { return target_set_; }

  /// Rule for (q, v), or nullptr when the pair has no transition.
  const TransitionRule* find_rule(ModeId q, InputId v) const;

  /// Rule indices leaving q, in declared input order.
  const std::vector<int>& rules_from(ModeId q) const { return rules_from_.at(q); }

  bool is_target_mode(ModeId q) const { return target_flag_.at(q); }
  bool in_target(ModeId q, const Vector& x, Scalar tol = kFeasTol) const {
    return is_target_mode(q) && contains(target_set_, x, tol);
  }

 private:
  std::vector<std::string> mode_names_;
  std::vector<std::string> input_names_;
  int state_dim_;
  int input_dim_;
  Polyhedron domain_;
  std::vector<TransitionRule> rules_;
  std::vector<QuadraticStageCost> costs_;
  std::vector<ModeId> target_modes_;
  Polyhedron target_set_;

  std::vector<std::vector<int>> rule_index_;  // [mode][input] -> rule or -1
  std::vector<std::vector<int>> rules_from_;
  std::vector<bool> target_flag_;
};

/// Feasible trajectory with its accumulated stage cost.
struct Trajectory {
  std::vector<ModeId> modes;    // length l + 1
  std::vector<Vector> states;   // length l + 1
  std::vector<InputId> vs;      // length l
  std::vector<Vector> us;       // length l
  Scalar cost = 0;

  Index length() const { return static_cast<Index>(vs.size()); }
};

/// Single transition step. Empty when no rule exists for (q, v), u violates
/// the input set, or the successor leaves the guard.
std::optional<std::pair<ModeId, Vector>> post(const HybridSystem& sys, ModeId q, const Vector& x,
                                              InputId v, const Vector& u, Scalar tol = kFeasTol);

/// Chains post() over the input tuples; empty if any step is infeasible.
std::optional<Trajectory> simulate(const HybridSystem& sys, ModeId q0, const Vector& x0,
                                   const std::vector<InputId>& vs, const std::vector<Vector>& us,
                                   Scalar tol = kFeasTol);

/// Structural diagnostics: determinism of (q, v) pairs, referential
/// integrity, guard-domain containment, PSD stage costs. Empty means valid.
std::vector<Diagnostic> validate(const HybridSystem& sys);

}  // namespace hybnb

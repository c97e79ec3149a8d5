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

#include "hybnb/hybrid_system.hpp"

#include <Eigen/Eigenvalues>

#include <set>
#include <sstream>

namespace hybnb {

HybridSystem::HybridSystem(std::vector<std::string> mode_names,
                           std::vector<std::string> input_names, int state_dim, int input_dim,
                           Polyhedron state_domain, std::vector<TransitionRule> rules,
                           std::vector<QuadraticStageCost> stage_costs,
                           std::vector<ModeId> target_modes, Polyhedron target_set)
    : mode_names_(std::move(mode_names)),
      input_names_(std::move(input_names)),
      state_dim_(state_dim),
      input_dim_(input_dim),
      domain_(std::move(state_domain)),
      rules_(std::move(rules)),
      costs_(std::move(stage_costs)),
      target_modes_(std::move(target_modes)),
      target_set_(std::move(target_set)) {
  const int nq = num_modes();
  const int nv = num_inputs();
  rule_index_.assign(nq, std::vector<int>(nv, -1));
  rules_from_.assign(nq, {});
  for (size_t i = 0; i < rules_.size(); ++i) {
    const TransitionRule& r = rules_[i];
    if (r.from < 0 || r.from >= nq || r.to < 0 || r.to >= nq || r.input < 0 || r.input >= nv)
      throw ConfigError("transition rule references an unknown mode or input");
    // Duplicate (q, v) pairs are kept in rules_ so validate() can report
    // them; the lookup table keeps the first.
    if (rule_index_[r.from][r.input] < 0) rule_index_[r.from][r.input] = static_cast<int>(i);
  }
  for (int q = 0; q < nq; ++q)
    for (int v = 0; v < nv; ++v)
      if (rule_index_[q][v] >= 0) rules_from_[q].push_back(rule_index_[q][v]);
  target_flag_.assign(nq, false);
  for (ModeId q : target_modes_) {
    if (q < 0 || q >= nq) throw ConfigError("target references an unknown mode");
    target_flag_[q] = true;
  }
  if (static_cast<int>(costs_.size()) != nq)
    throw ConfigError("expected one stage cost per mode");
}

ModeId HybridSystem::mode_id(const std::string& name) const {
  for (size_t i = 0; i < mode_names_.size(); ++i)
    if (mode_names_[i] == name) return static_cast<ModeId>(i);
  throw UsageError("unknown mode label: " + name);
}

InputId HybridSystem::input_id(const std::string& name) const {
  for (size_t i = 0; i < input_names_.size(); ++i)
    if (input_names_[i] == name) return static_cast<InputId>(i);
  throw UsageError("unknown input label: " + name);
}

const TransitionRule* HybridSystem::find_rule(ModeId q, InputId v) const {
  if (q < 0 || q >= num_modes()) throw UsageError("unknown mode id");
  if (v < 0 || v >= num_inputs()) throw UsageError("unknown input id");
  const int idx = rule_index_[q][v];
  return idx >= 0 ? &rules_[idx] : nullptr;
}

std::optional<std::pair<ModeId, Vector>> post(const HybridSystem& sys, ModeId q, const Vector& x,
                                              InputId v, const Vector& u, Scalar tol) {
  if (x.size() != sys.state_dim() || u.size() != sys.input_dim())
    throw UsageError("post: dimension mismatch");
  const TransitionRule* rule = sys.find_rule(q, v);
  if (rule == nullptr) return std::nullopt;
  if (!contains(rule->input_set, u, tol)) return std::nullopt;
  Vector xp = rule->dyn_A * x + rule->dyn_B * u + rule->dyn_c;
  if (!contains(rule->guard_next, xp, tol)) return std::nullopt;
  return std::make_pair(rule->to, std::move(xp));
}

std::optional<Trajectory> simulate(const HybridSystem& sys, ModeId q0, const Vector& x0,
                                   const std::vector<InputId>& vs, const std::vector<Vector>& us,
                                   Scalar tol) {
  if (vs.size() != us.size()) throw UsageError("simulate: |vs| != |us|");
  Trajectory traj;
  traj.modes.push_back(q0);
  traj.states.push_back(x0);
  ModeId q = q0;
  Vector x = x0;
  for (size_t i = 0; i < vs.size(); ++i) {
    auto next = post(sys, q, x, vs[i], us[i], tol);
    if (!next) return std::nullopt;
    traj.cost += sys.stage_cost(q).eval(x, us[i]);
    q = next->first;
    x = next->second;
    traj.modes.push_back(q);
    traj.states.push_back(x);
    traj.vs.push_back(vs[i]);
    traj.us.push_back(us[i]);
  }
  return traj;
}

namespace {

bool psd_to_tolerance(const Matrix& m, Scalar tol) {
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

// Every domain row must appear verbatim among the guard rows.
bool guard_includes_domain(const Polyhedron& guard, const Polyhedron& domain) {
  for (Index i = 0; i < domain.num_rows(); ++i) {
    bool found = false;
    for (Index j = 0; j < guard.num_rows() && !found; ++j) {
      found = (guard.normals.row(j) - domain.normals.row(i)).lpNorm<Eigen::Infinity>() <= 1e-9 &&
              std::abs(guard.offsets[j] - domain.offsets[i]) <= 1e-9;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

std::vector<Diagnostic> validate(const HybridSystem& sys) {
  std::vector<Diagnostic> out;
  std::set<std::pair<ModeId, InputId>> seen;
  const int nx = sys.state_dim();
  const int nu = sys.input_dim();

  for (size_t i = 0; i < sys.rules().size(); ++i) {
    const TransitionRule& r = sys.rules()[i];
    std::ostringstream where;
    where << "rule " << i << " (" << sys.mode_name(r.from) << ", " << sys.input_name(r.input)
          << " -> " << sys.mode_name(r.to) << ")";
    if (!seen.insert({r.from, r.input}).second)
      out.push_back({"nondeterministic pair at " + where.str()});
    if (r.dyn_A.rows() != nx || r.dyn_A.cols() != nx || r.dyn_B.rows() != nx ||
        r.dyn_B.cols() != nu || r.dyn_c.size() != nx)
      out.push_back({"dynamics dimension mismatch at " + where.str()});
    if (r.guard_next.dim() != nx) out.push_back({"guard dimension mismatch at " + where.str()});
    if (r.input_set.dim() != nu)
      out.push_back({"input-set dimension mismatch at " + where.str()});
    if (r.guard_next.dim() == nx && !guard_includes_domain(r.guard_next, sys.state_domain()))
      out.push_back({"guard does not include the state-domain rows at " + where.str()});
  }

  for (ModeId q = 0; q < sys.num_modes(); ++q) {
    const QuadraticStageCost& c = sys.stage_cost(q);
    if (c.quad_x.rows() != nx || c.quad_x.cols() != nx || c.quad_u.rows() != nu ||
        c.quad_u.cols() != nu || c.lin_x.size() != nx || c.lin_u.size() != nu) {
      out.push_back({"stage cost dimension mismatch at mode " + sys.mode_name(q)});
      continue;
    }
    if (!psd_to_tolerance(c.quad_x, 1e-8))
      out.push_back({"stage cost quad_x not PSD at mode " + sys.mode_name(q)});
    if (!psd_to_tolerance(c.quad_u, 1e-8))
      out.push_back({"stage cost quad_u not PSD at mode " + sys.mode_name(q)});
  }

  if (sys.target_set().dim() != nx) out.push_back({"target set dimension mismatch"});
  if (sys.target_modes().empty()) out.push_back({"no target modes declared"});
  return out;
}

}  // namespace hybnb

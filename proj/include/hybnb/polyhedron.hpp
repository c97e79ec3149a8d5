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

#include "hybnb/qp_solver.hpp"
#include "hybnb/types.hpp"

namespace hybnb {

/// Convex set in halfspace representation, { x : H x <= h }.
template <typename S>
struct PolyhedronT {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  Mat normals;  // H, m x n
  Vec offsets;  // h, m

  Index dim() const { return normals.cols(); }
  Index num_rows() const { return normals.rows(); }

  /// Axis-aligned box [lo_1, hi_1] x ... x [lo_n, hi_n].
  static PolyhedronT box(const Vec& lo, const Vec& hi) {
    const Index n = lo.size();
    PolyhedronT p;
    p.normals = Mat::Zero(2 * n, n);
    p.offsets.resize(2 * n);
    for (Index i = 0; i < n; ++i) {
      p.normals(2 * i, i) = 1;
      p.offsets[2 * i] = hi[i];
      p.normals(2 * i + 1, i) = -1;
      p.offsets[2 * i + 1] = -lo[i];
    }
    return p;
  }

  /// Rows of `this` followed by rows of `other` (set intersection).
  PolyhedronT intersect(const PolyhedronT& other) const {
    PolyhedronT p;
    p.normals.resize(num_rows() + other.num_rows(), dim());
    p.normals << normals, other.normals;
    p.offsets.resize(offsets.size() + other.offsets.size());
    p.offsets << offsets, other.offsets;
    return p;
  }
};

template <typename S>
bool contains(const PolyhedronT<S>& p, const Eigen::Matrix<S, Eigen::Dynamic, 1>& x,
              S tol = S(kFeasTol)) {
  if (x.size() != p.dim()) throw UsageError("contains: point dimension mismatch");
  if (p.num_rows() == 0) return true;
  return ((p.normals * x - p.offsets).array() <= tol).all();
}

/// Phase-1 emptiness test: min s subject to Hx <= h + s*1, s >= 0 has a
/// positive optimum exactly when the set is empty.
template <typename S>
bool is_empty(const PolyhedronT<S>& p, S tol = S(kFeasTol),
              QpSolverT<S>* solver = nullptr) {
  const Index n = p.dim();
  const Index m = p.num_rows();
  if (m == 0) return false;

  QuadProgramT<S> qp;
  qp.quad_cost = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>::Zero(n + 1, n + 1);
  qp.lin_cost = Eigen::Matrix<S, Eigen::Dynamic, 1>::Zero(n + 1);
  qp.lin_cost[n] = 1;
  qp.ineq_normals.resize(m + 1, n + 1);
  qp.ineq_normals.leftCols(n) << p.normals, Eigen::Matrix<S, 1, Eigen::Dynamic>::Zero(n);
  qp.ineq_normals.col(n).head(m).setConstant(-1);
  qp.ineq_normals(m, n) = -1;
  qp.ineq_offsets.resize(m + 1);
  qp.ineq_offsets << p.offsets, 0;

  QpSolutionT<S> sol;
  if (solver) {
    sol = solver->solve(qp);
  } else {
    QpSolverT<S> local;
    sol = local.solve(qp);
  }
  if (sol.status == QpStatus::IterLimit)
    throw std::runtime_error("is_empty: phase-1 LP did not converge");
  return sol.objective > tol;
}

using Polyhedron = PolyhedronT<Scalar>;

}  // namespace hybnb

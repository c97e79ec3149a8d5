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
//
// Dense convex QP solver based on operator splitting (ADMM), with adaptive
// penalty, divergence-based infeasibility certificates and an active-set
// polishing step that sharpens primal/dual accuracy after convergence.
//
// Solves   min  1/2 x'Px + q'x + r
//          s.t. A_eq x  = b_eq
//               A_in x <= b_in
// with P symmetric positive semidefinite.

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hybnb/types.hpp"

namespace hybnb {

enum class QpStatus { Optimal, Infeasible, IterLimit };

template <typename S>
struct QuadProgramT {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  Mat quad_cost;     // P, n x n, symmetric PSD
  Vec lin_cost;      // q, n
  S const_cost = 0;  // r

  Mat eq_normals;  // A_eq, me x n
  Vec eq_offsets;  // b_eq, me

  Mat ineq_normals;  // A_in, mi x n
  Vec ineq_offsets;  // b_in, mi

  Index num_vars() const { return lin_cost.size(); }
  Index num_eq() const { return eq_offsets.size(); }
  Index num_ineq() const { return ineq_offsets.size(); }
};

template <typename S>
struct QpSettingsT {
  S eps = 1e-7;          // target primal/dual residual tolerance
  int max_iter = 20000;  // ADMM sweep limit
  S rho = 0.1;           // initial penalty (inequality rows)
  S rho_eq_scale = 1e3;  // equality rows get rho * rho_eq_scale
  S sigma = 1e-6;        // x-regularization
  S alpha = 1.6;         // over-relaxation
  int check_interval = 25;
  bool adaptive_rho = true;
  S eps_infeas = 1e-7;     // certificate tolerance
  bool polish = true;      // active-set KKT re-solve after convergence
  S polish_delta = 1e-8;   // regularization of the polish KKT system
  S loose_eps = 1e-5;      // first convergence stage before polishing
};

template <typename S>
struct QpSolutionT {
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  QpStatus status = QpStatus::IterLimit;
  Vec primal;
  Vec dual_eq;    // free sign
  Vec dual_ineq;  // >= 0 at optimality
  S objective = std::numeric_limits<S>::infinity();
  int iterations = 0;
  bool polished = false;

  // Residuals at the returned point (infinity norms).
  S stationarity_residual = std::numeric_limits<S>::infinity();
  S feasibility_residual = std::numeric_limits<S>::infinity();
  S complementarity_residual = std::numeric_limits<S>::infinity();
};

namespace detail {

template <typename S>
struct KktResiduals {
  S stationarity;
  S feasibility;
  S complementarity;
  S max() const { return std::max(stationarity, std::max(feasibility, complementarity)); }
};

// KKT residuals of (x, nu, lam) for the stacked program. Complementarity is
// measured relative to the multiplier magnitude so it stays comparable with
// the other residuals on badly scaled rows.
template <typename S>
KktResiduals<S> kkt_residuals(const QuadProgramT<S>& qp,
                              const Eigen::Matrix<S, Eigen::Dynamic, 1>& x,
                              const Eigen::Matrix<S, Eigen::Dynamic, 1>& nu,
                              const Eigen::Matrix<S, Eigen::Dynamic, 1>& lam) {
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  Vec grad = qp.quad_cost * x + qp.lin_cost;
  if (qp.num_eq() > 0) grad += qp.eq_normals.transpose() * nu;
  if (qp.num_ineq() > 0) grad += qp.ineq_normals.transpose() * lam;

  S feas = 0;
  if (qp.num_eq() > 0) feas = (qp.eq_normals * x - qp.eq_offsets).template lpNorm<Eigen::Infinity>();
  S comp = 0;
  if (qp.num_ineq() > 0) {
    Vec slack = qp.ineq_offsets - qp.ineq_normals * x;
    feas = std::max(feas, (-slack).cwiseMax(S(0)).template lpNorm<Eigen::Infinity>());
    for (Index i = 0; i < slack.size(); ++i) {
      comp = std::max(comp, std::abs(lam[i] * slack[i]) / (S(1) + std::abs(lam[i])));
      comp = std::max(comp, std::max(S(0), -lam[i]));  // sign violation
    }
  }
  S stat = grad.size() > 0 ? grad.template lpNorm<Eigen::Infinity>() : S(0);
  return {stat, feas, comp};
}

template <typename S>
S objective_value(const QuadProgramT<S>& qp, const Eigen::Matrix<S, Eigen::Dynamic, 1>& x) {
  return S(0.5) * x.dot(qp.quad_cost * x) + qp.lin_cost.dot(x) + qp.const_cost;
}

}  // namespace detail

/// Operator-splitting QP solver with reusable workspace. A solver instance
/// holds no problem state between calls and is safe to move across threads;
/// a single solve is single-threaded.
template <typename S>
class QpSolverT {
 public:
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  using Settings = QpSettingsT<S>;
  using Solution = QpSolutionT<S>;

  QpSolverT() = default;
  explicit QpSolverT(Settings settings) : settings_(settings) {}

  Settings& settings() { return settings_; }
  const Settings& settings() const { return settings_; }

  /// Number of solves performed by this instance (diagnostics).
  long solve_count() const { return solve_count_; }

  Solution solve(const QuadProgramT<S>& qp) {
    ++solve_count_;
    validate(qp);

    const Index n = qp.num_vars();
    const Index me = qp.num_eq();
    const Index mi = qp.num_ineq();
    const Index m = me + mi;

    if (m == 0) return solve_unconstrained(qp);

    // Stacked constraints l <= Ax <= u; equality rows have l = u.
    A_.resize(m, n);
    if (me > 0) A_.topRows(me) = qp.eq_normals;
    if (mi > 0) A_.bottomRows(mi) = qp.ineq_normals;
    lower_.resize(m);
    upper_.resize(m);
    if (me > 0) {
      lower_.head(me) = qp.eq_offsets;
      upper_.head(me) = qp.eq_offsets;
    }
    if (mi > 0) {
      lower_.tail(mi).setConstant(-std::numeric_limits<S>::infinity());
      upper_.tail(mi) = qp.ineq_offsets;
    }

    S rho_bar = settings_.rho;
    build_rho(rho_bar, me, mi);
    factorize(qp, n, m);

    x_.setZero(n);
    z_.setZero(m);
    y_.setZero(m);
    y_prev_ = y_;
    x_prev_check_.setZero(n);

    Solution best;
    best.primal = x_;
    best.dual_eq = Vec::Zero(me);
    best.dual_ineq = Vec::Zero(mi);

    const S target_eps = settings_.eps;
    S stage_eps = std::max(target_eps, settings_.loose_eps);
    bool infeas_candidate = false;

    int iter = 0;
    while (iter < settings_.max_iter) {
      for (int k = 0; k < settings_.check_interval && iter < settings_.max_iter; ++k, ++iter) {
        y_prev_ = y_;
        rhs_.head(n) = settings_.sigma * x_ - qp.lin_cost;
        rhs_.tail(m) = z_ - y_.cwiseQuotient(rho_);
        sol_ = ldlt_.solve(rhs_);
        xt_ = sol_.head(n);
        nu_ = sol_.tail(m);
        zt_ = z_ + (nu_ - y_).cwiseQuotient(rho_);

        x_ = settings_.alpha * xt_ + (1 - settings_.alpha) * x_;
        w_ = settings_.alpha * zt_ + (1 - settings_.alpha) * z_;
        v_ = w_ + y_.cwiseQuotient(rho_);
        z_ = v_.cwiseMax(lower_).cwiseMin(upper_);
        y_ = rho_.cwiseProduct(v_ - z_);
      }

      // Residual check.
      Ax_ = A_ * x_;
      Px_ = qp.quad_cost * x_;
      Aty_ = A_.transpose() * y_;
      const S r_prim = (Ax_ - z_).template lpNorm<Eigen::Infinity>();
      const S r_dual = (Px_ + qp.lin_cost + Aty_).template lpNorm<Eigen::Infinity>();
      const S sc_prim = std::max({Ax_.template lpNorm<Eigen::Infinity>(),
                                  z_.template lpNorm<Eigen::Infinity>(), S(1)});
      const S sc_dual = std::max({Px_.template lpNorm<Eigen::Infinity>(),
                                  Aty_.template lpNorm<Eigen::Infinity>(),
                                  qp.lin_cost.template lpNorm<Eigen::Infinity>(), S(1)});

      if (r_prim <= stage_eps * sc_prim && r_dual <= stage_eps * sc_dual) {
        Solution cand = extract(qp, n, me, mi, iter);
        if (settings_.polish) try_polish(qp, cand);
        const S acc = accept_eps(target_eps, sc_prim, sc_dual);
        if (cand.stationarity_residual <= acc && cand.feasibility_residual <= acc &&
            cand.complementarity_residual <= acc) {
          cand.status = QpStatus::Optimal;
          return cand;
        }
        if (stage_eps > target_eps) {
          stage_eps = target_eps;  // keep iterating to full accuracy
        } else {
          // Converged per ADMM residuals at target accuracy; accept even if
          // the polish verification margin was not met.
          cand.status = QpStatus::Optimal;
          return cand;
        }
      }

      // Primal infeasibility certificate from the dual update direction.
      dy_ = y_ - y_prev_;
      const S dy_norm = dy_.template lpNorm<Eigen::Infinity>();
      if (dy_norm > S(1e-14)) {
        dy_ /= dy_norm;
        bool onesided_ok = true;
        S support = 0;
        for (Index i = 0; i < m; ++i) {
          if (dy_[i] > 0) {
            support += upper_[i] * dy_[i];
          } else if (dy_[i] < 0) {
            if (std::isinf(lower_[i])) {
              if (dy_[i] < -settings_.eps_infeas) onesided_ok = false;
            } else {
              support += lower_[i] * dy_[i];
            }
          }
        }
        const S aty_cert = (A_.transpose() * dy_).template lpNorm<Eigen::Infinity>();
        const S a_scale = std::max(S(1), A_.template lpNorm<Eigen::Infinity>());
        if (onesided_ok && aty_cert <= settings_.eps_infeas * a_scale &&
            support <= -settings_.eps_infeas) {
          if (infeas_candidate) {
            Solution sol;
            sol.status = QpStatus::Infeasible;
            sol.primal = x_;
            sol.dual_eq = Vec::Zero(me);
            sol.dual_ineq = Vec::Zero(mi);
            sol.objective = std::numeric_limits<S>::infinity();
            sol.iterations = iter;
            return sol;
          }
          infeas_candidate = true;
        } else {
          infeas_candidate = false;
        }
      }

      // Dual infeasibility (unbounded below): bail out, caller treats
      // IterLimit conservatively.
      if (iter > 100 && dual_infeasible(qp)) break;

      if (settings_.adaptive_rho) {
        const S ratio = std::sqrt((r_prim / sc_prim) / std::max(r_dual / sc_dual, S(1e-16)));
        if (std::isfinite(ratio) && (ratio > 5 || ratio < S(0.2))) {
          rho_bar = std::clamp(rho_bar * ratio, S(1e-6), S(1e6));
          build_rho(rho_bar, me, mi);
          factorize(qp, n, m);
        }
      }
    }

    Solution sol = extract(qp, n, me, mi, settings_.max_iter);
    if (settings_.polish) try_polish(qp, sol);
    sol.status = QpStatus::IterLimit;
    return sol;
  }

 private:
  static void validate(const QuadProgramT<S>& qp) {
    const Index n = qp.num_vars();
    if (qp.quad_cost.rows() != n || qp.quad_cost.cols() != n)
      throw UsageError("quad_cost dimension mismatch");
    if (n > 0) {
      const S asym = (qp.quad_cost - qp.quad_cost.transpose()).template lpNorm<Eigen::Infinity>();
      const S scale = std::max(S(1), qp.quad_cost.template lpNorm<Eigen::Infinity>());
      if (asym > S(1e-10) * scale) throw UsageError("quad_cost is not symmetric");
    }
    if (qp.eq_normals.rows() != qp.num_eq() || (qp.num_eq() > 0 && qp.eq_normals.cols() != n))
      throw UsageError("equality block dimension mismatch");
    if (qp.ineq_normals.rows() != qp.num_ineq() ||
        (qp.num_ineq() > 0 && qp.ineq_normals.cols() != n))
      throw UsageError("inequality block dimension mismatch");
  }

  Solution solve_unconstrained(const QuadProgramT<S>& qp) {
    const Index n = qp.num_vars();
    Mat reg = qp.quad_cost + Mat::Identity(n, n) * settings_.sigma;
    Eigen::LDLT<Mat> ldlt(reg);
    Solution sol;
    sol.primal = ldlt.solve(-qp.lin_cost);
    sol.dual_eq.resize(0);
    sol.dual_ineq.resize(0);
    sol.iterations = 0;
    auto res = detail::kkt_residuals<S>(qp, sol.primal, sol.dual_eq, sol.dual_ineq);
    sol.stationarity_residual = res.stationarity;
    sol.feasibility_residual = 0;
    sol.complementarity_residual = 0;
    sol.objective = detail::objective_value(qp, sol.primal);
    const S scale = std::max(S(1), qp.lin_cost.template lpNorm<Eigen::Infinity>());
    sol.status = res.stationarity <= std::sqrt(settings_.sigma) * scale ? QpStatus::Optimal
                                                                        : QpStatus::IterLimit;
    return sol;
  }

  static S accept_eps(S target_eps, S sc_prim, S sc_dual) {
    return target_eps * std::max(sc_prim, sc_dual);
  }

  void build_rho(S rho_bar, Index me, Index mi) {
    rho_.resize(me + mi);
    rho_.head(me).setConstant(rho_bar * settings_.rho_eq_scale);
    rho_.tail(mi).setConstant(rho_bar);
  }

  void factorize(const QuadProgramT<S>& qp, Index n, Index m) {
    kkt_.setZero(n + m, n + m);
    kkt_.topLeftCorner(n, n) = qp.quad_cost + Mat::Identity(n, n) * settings_.sigma;
    kkt_.topRightCorner(n, m) = A_.transpose();
    kkt_.bottomLeftCorner(m, n) = A_;
    kkt_.bottomRightCorner(m, m) = (-rho_.cwiseInverse()).asDiagonal();
    ldlt_.compute(kkt_);
    rhs_.resize(n + m);
  }

  Solution extract(const QuadProgramT<S>& qp, Index n, Index me, Index mi, int iter) {
    Solution sol;
    sol.primal = x_;
    sol.dual_eq = y_.head(me);
    sol.dual_ineq = y_.tail(mi).cwiseMax(S(0));
    sol.iterations = iter;
    auto res = detail::kkt_residuals<S>(qp, sol.primal, sol.dual_eq, sol.dual_ineq);
    sol.stationarity_residual = res.stationarity;
    sol.feasibility_residual = res.feasibility;
    sol.complementarity_residual = res.complementarity;
    sol.objective = detail::objective_value(qp, sol.primal);
    return sol;
  }

  // Re-solve the KKT system on the detected active set; keep the result only
  // if it does not degrade the residuals.
  void try_polish(const QuadProgramT<S>& qp, Solution& sol) {
    const Index n = qp.num_vars();
    const Index me = qp.num_eq();
    const Index mi = qp.num_ineq();

    std::vector<Index> active;
    if (mi > 0) {
      Vec slack = qp.ineq_offsets - qp.ineq_normals * sol.primal;
      for (Index i = 0; i < mi; ++i) {
        const S ytol = S(1e-9) * std::max(S(1), sol.dual_ineq.template lpNorm<Eigen::Infinity>());
        const S stol = S(10) * settings_.loose_eps * (S(1) + std::abs(qp.ineq_offsets[i]));
        if (sol.dual_ineq[i] > ytol || slack[i] < stol) active.push_back(i);
      }
    }
    const Index ma = me + static_cast<Index>(active.size());
    if (ma == 0) return;

    Mat G(ma, n);
    Vec g(ma);
    if (me > 0) {
      G.topRows(me) = qp.eq_normals;
      g.head(me) = qp.eq_offsets;
    }
    for (size_t k = 0; k < active.size(); ++k) {
      G.row(me + static_cast<Index>(k)) = qp.ineq_normals.row(active[k]);
      g[me + static_cast<Index>(k)] = qp.ineq_offsets[active[k]];
    }

    const S delta = settings_.polish_delta;
    Mat K(n + ma, n + ma);
    K.setZero();
    K.topLeftCorner(n, n) = qp.quad_cost + Mat::Identity(n, n) * delta;
    K.topRightCorner(n, ma) = G.transpose();
    K.bottomLeftCorner(ma, n) = G;
    K.bottomRightCorner(ma, ma) = -Mat::Identity(ma, ma) * delta;
    Eigen::LDLT<Mat> kld(K);
    if (kld.info() != Eigen::Success) return;

    Vec rhs(n + ma);
    rhs.head(n) = -qp.lin_cost;
    rhs.tail(ma) = g;
    Vec t = kld.solve(rhs);

    // Iterative refinement against the unregularized system.
    for (int round = 0; round < 3; ++round) {
      Vec resid(n + ma);
      resid.head(n) = rhs.head(n) - (qp.quad_cost * t.head(n) + G.transpose() * t.tail(ma));
      resid.tail(ma) = rhs.tail(ma) - G * t.head(n);
      t += kld.solve(resid);
    }

    Solution cand;
    cand.primal = t.head(n);
    cand.dual_eq = t.segment(n, me);
    cand.dual_ineq = Vec::Zero(mi);
    for (size_t k = 0; k < active.size(); ++k)
      cand.dual_ineq[active[k]] = std::max(S(0), t[n + me + static_cast<Index>(k)]);
    auto res = detail::kkt_residuals<S>(qp, cand.primal, cand.dual_eq, cand.dual_ineq);
    const S cand_max = res.max();
    const S cur_max = std::max(sol.stationarity_residual,
                               std::max(sol.feasibility_residual, sol.complementarity_residual));
    if (std::isfinite(cand_max) && cand_max <= cur_max) {
      cand.stationarity_residual = res.stationarity;
      cand.feasibility_residual = res.feasibility;
      cand.complementarity_residual = res.complementarity;
      cand.objective = detail::objective_value(qp, cand.primal);
      cand.iterations = sol.iterations;
      cand.polished = true;
      cand.status = sol.status;
      sol = cand;
    }
  }

  bool dual_infeasible(const QuadProgramT<S>& qp) {
    dx_ = x_ - x_prev_check_;
    x_prev_check_ = x_;
    const S dx_norm = dx_.template lpNorm<Eigen::Infinity>();
    if (dx_norm <= S(1e-12)) return false;
    dx_ /= dx_norm;
    const S eps = settings_.eps_infeas;
    if (qp.lin_cost.dot(dx_) > -eps) return false;
    if ((qp.quad_cost * dx_).template lpNorm<Eigen::Infinity>() > eps) return false;
    Vec Adx = A_ * dx_;
    for (Index i = 0; i < Adx.size(); ++i) {
      const bool eq_row = !std::isinf(lower_[i]);
      if (eq_row && std::abs(Adx[i]) > eps) return false;
      if (!eq_row && Adx[i] > eps) return false;
    }
    return true;
  }

  Settings settings_;
  long solve_count_ = 0;

  // Workspace, reused across solves.
  Mat A_, kkt_;
  Vec lower_, upper_, rho_, x_, z_, y_, y_prev_, rhs_, sol_, xt_, nu_, zt_, w_, v_;
  Vec Ax_, Px_, Aty_, dy_, dx_, x_prev_check_ = Vec::Zero(0);
  Eigen::LDLT<Mat> ldlt_;
};

using QuadProgram = QuadProgramT<Scalar>;
using QpSettings = QpSettingsT<Scalar>;
using QpSolution = QpSolutionT<Scalar>;
using QpSolver = QpSolverT<Scalar>;

/// One-shot solve with default settings overridden by (tol, max_iter).
template <typename S>
QpSolutionT<S> solve_qp(const QuadProgramT<S>& qp, S tol = S(1e-7), int max_iter = 20000) {
  QpSettingsT<S> st;
  st.eps = tol;
  st.max_iter = max_iter;
  QpSolverT<S> solver(st);
  return solver.solve(qp);
}

}  // namespace hybnb

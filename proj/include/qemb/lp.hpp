// Copyright 2026 The qemb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qemb/core.hpp"

namespace qemb {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  RVec x;
  double objective = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(RMat::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  RMat& m() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double rhs(Eigen::Index i) const { return t_(i, cols()); }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule; columns >= allowed_cols never enter.
  LpStatus run(Eigen::Index allowed_cols, double tol, int max_iter) {
    const Eigen::Index obj = rows();
    for (int it = 0; it < max_iter; ++it) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        if (t_(obj, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        const double a = t_(i, enter);
        if (a <= tol) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best - tol ||
            (std::abs(ratio - best) <= tol && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    return LpStatus::IterationLimit;
  }

 private:
  RMat t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

/**
 * Dense two-phase simplex for  min c.x  s.t.  A x = b, x >= 0.
 */
inline LpResult solve_lp(const RVec& c, const RMat& a, const RVec& b, double tol = 1e-10, int max_iter = 100000) {
  const Eigen::Index m = a.rows(), nv = a.cols();
  if (c.size() != nv || b.size() != m) throw ValidationError("solve_lp: dimension mismatch");
  detail::Tableau tab(m, nv + m);
  RMat& t = tab.m();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = b(i) < 0 ? -1.0 : 1.0;
    t.row(i).head(nv) = s * a.row(i);
    t(i, nv + i) = 1.0;
    t(i, nv + m) = s * b(i);
    tab.basis()[static_cast<std::size_t>(i)] = nv + i;
  }
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  const double eps = tol * scale;

  // Phase 1: minimize the sum of artificials.
  for (Eigen::Index i = 0; i < m; ++i) {
    t.row(m).head(nv) -= t.row(i).head(nv);
    t(m, nv + m) -= t(i, nv + m);
  }
  LpResult res;
  LpStatus st = tab.run(nv, eps, max_iter);
  if (st == LpStatus::IterationLimit) {
    res.status = st;
    return res;
  }
  if (-t(m, nv + m) > std::sqrt(eps) * std::max(1.0, b.cwiseAbs().sum())) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] < nv) continue;
    for (Eigen::Index j = 0; j < nv; ++j) {
      if (std::abs(t(i, j)) > eps) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2.
  t.row(m).setZero();
  t.row(m).head(nv) = c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
    if (bj < nv && c(bj) != 0.0) t.row(m) -= c(bj) * t.row(i);
  }
  st = tab.run(nv, eps, max_iter);
  res.status = st;
  if (st != LpStatus::Optimal) return res;
  res.x = RVec::Zero(nv);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
    if (bj < nv) res.x(bj) = std::max(0.0, tab.rhs(i));
  }
  res.objective = c.dot(res.x);
  return res;
}

/**
 * min ||q||_1  s.t.  sum_b q_b columns.col(b) = target, via the split q = q+ - q-.
 * Rows that vanish in both the dictionary and the target are dropped first.
 */
inline LpResult solve_l1_decomposition(const RMat& columns, const RVec& target, double tol = 1e-10) {
  if (columns.rows() != target.size()) throw ValidationError("decomposition: dimension mismatch");
  const Eigen::Index k = columns.cols();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < columns.rows(); ++i) {
    if (columns.row(i).cwiseAbs().maxCoeff() > tol || std::abs(target(i)) > tol) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  RMat a(m, 2 * k);
  RVec b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index i = keep[static_cast<std::size_t>(r)];
    a.row(r).head(k) = columns.row(i);
    a.row(r).tail(k) = -columns.row(i);
    b(r) = target(i);
  }
  LpResult split = solve_lp(RVec::Ones(2 * k), a, b, tol);
  if (split.status != LpStatus::Optimal) return split;
  LpResult out;
  out.status = LpStatus::Optimal;
  out.x = split.x.head(k) - split.x.tail(k);
  out.objective = out.x.cwiseAbs().sum();
  return out;
}

}  // namespace qemb

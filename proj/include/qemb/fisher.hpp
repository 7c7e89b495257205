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
#include <optional>
#include <vector>

#include "qemb/channel.hpp"

namespace qemb {

/// J is not invertible; carries a unit vector of its (numerical) kernel.
struct SingularQfiError : Error {
  SingularQfiError(const std::string& what, RVec null_dir) : Error(what), null_direction(std::move(null_dir)) {}
  RVec null_direction;
};

struct QfiMatrix {
  int n = 1;
  RMat j;
  /// Output state is rank deficient and some derivative leaks into its kernel.
  bool divergent = false;

  double max_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<RMat> es(j, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
};

/**
 * SLD Fisher information of E(rho(theta)) with respect to theta.
 *
 * The map is affine in theta, so the derivative along theta_i is
 * D_i = E(2^((-1-n)/2) P_i) = 2^((-1-n)/2) sum_k T_ki P_k.
 */
inline QfiMatrix qfi_bloch(const TransferMap& eff, const BlochVector& theta, double rank_cutoff = 1e-12,
                           double leak_tol = 1e-9) {
  if (theta.n != eff.n) throw ValidationError("qfi_bloch: qubit counts differ");
  const int n = eff.n;
  const auto m = static_cast<Eigen::Index>(pow4(n) - 1);
  const CMat rho = eff.apply(density_from_bloch(theta));
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()));
  const RVec lam = es.eigenvalues();
  const CMat v = es.eigenvectors();
  const double pre = std::pow(2.0, (-1.0 - n) / 2.0);
  const auto d = lam.size();

  std::vector<CMat> dt(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const CVec coords = (pre * static_cast<double>(pow2(n))) * eff.full.col(i + 1).cast<cplx>();
    dt[static_cast<std::size_t>(i)] = v.adjoint() * operator_from_pauli_coordinates(n, coords) * v;
  }

  QfiMatrix out{n, RMat::Zero(m, m), false};
  RMat weight = RMat::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const double s = lam(a) + lam(b);
      if (s > rank_cutoff) {
        weight(a, b) = 2.0 / s;
      } else {
        for (Eigen::Index i = 0; i < m && !out.divergent; ++i) {
          if (std::abs(dt[static_cast<std::size_t>(i)](a, b)) > leak_tol) out.divergent = true;
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const CMat& di = dt[static_cast<std::size_t>(i)];
    for (Eigen::Index k = i; k < m; ++k) {
      const CMat& dk = dt[static_cast<std::size_t>(k)];
      // sum_ab w_ab Re[Di_ab Dk_ba]
      const double val = (weight.array() * (di.array() * dk.transpose().array()).real()).sum();
      out.j(i, k) = val;
      out.j(k, i) = val;
    }
  }
  return out;
}

/// (2^(n-1) / N) x^T J^-1 x
inline double cr_bound(const QfiMatrix& j, const Observable& obs, double copies = 1.0) {
  if (obs.n != j.n || obs.coeffs.size() != j.j.rows()) throw ValidationError("cr_bound: dimension mismatch");
  if (copies <= 0) throw ValidationError("cr_bound: copies must be positive");
  Eigen::SelfAdjointEigenSolver<RMat> es(j.j);
  const RVec lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam(0) <= 1e-12 * scale) throw SingularQfiError("Fisher information matrix is singular", es.eigenvectors().col(0));
  const RVec y = es.eigenvectors().transpose() * obs.coeffs;
  const double quad = (y.array().square() / lam.array()).sum();
  return std::pow(2.0, j.n - 1) / copies * quad;
}

/// Y = offset * I + y . P
struct OffsetObservable {
  Observable obs;
  double offset = 0.0;

  CMat matrix() const {
    const auto d = static_cast<Eigen::Index>(pow2(obs.n));
    return observable_matrix(obs) + offset * CMat::Identity(d, d);
  }
};

/// Y with tr[rho X] = tr[E(rho) Y]: y = (A^-1)^T x, offset = -2^((n-1)/2) y . c.
inline OffsetObservable optimal_observable(const TransferMap& noise, const Observable& obs) {
  if (obs.n != noise.n) throw ValidationError("optimal_observable: qubit counts differ");
  const RMat a = noise.A();
  Eigen::FullPivLU<RMat> lu(a);
  if (!lu.isInvertible()) {
    Eigen::BDCSVD<RMat> svd(a);
    throw NonInvertibleError("unital part is singular", svd.singularValues().minCoeff());
  }
  OffsetObservable y;
  y.obs = {obs.n, lu.inverse().transpose() * obs.coeffs};
  y.offset = -std::pow(2.0, (obs.n - 1) / 2.0) * y.obs.coeffs.dot(noise.c());
  return y;
}

/// Var_rho[M]
inline double variance(const DensityMatrix& rho, const CMat& m) {
  const double mean = (rho * m).trace().real();
  return (rho * m * m).trace().real() - mean * mean;
}

/**
 * Scalar b with J <= b I for N copies after L layers.
 *
 * b = 2^(n-1) N beta^-1 gamma^(-2L); the unital form replaces beta^-1 by
 * (1 - (1 - beta)^L)^-1. Returns nullopt when beta = 0.
 */
inline std::optional<double> lemma_bound(int n, std::size_t depth, double copies, double beta, double gamma,
                                         bool unital) {
  if (!(beta > 0.0)) return std::nullopt;
  if (gamma <= 0.0) throw ValidationError("lemma_bound: gamma must be positive");
  const double l = static_cast<double>(depth);
  const double log_beta_term = unital ? -std::log(-std::expm1(l * std::log1p(-beta))) : -std::log(beta);
  return std::exp((n - 1) * std::log(2.0) + std::log(copies) + log_beta_term - 2.0 * l * std::log(gamma));
}

namespace detail {

inline CMat psd_sqrt(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()));
  const RVec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const CMat sr = detail::psd_sqrt(rho);
  Eigen::SelfAdjointEigenSolver<CMat> es(sr * sigma * sr, Eigen::EigenvaluesOnly);
  const double t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return t * t;
}

/**
 * Finite-difference QFI from the Bures metric: v^T J v ~ 8 (1 - sqrt F) for
 * a displacement v, with symmetric stencils along e_i +- e_j.
 */
inline RMat qfi_finite_difference(const TransferMap& eff, const BlochVector& theta, double step = 1e-4) {
  const auto m = theta.theta.size();
  const CMat rho = eff.apply(density_from_bloch(theta));
  auto g = [&](const RVec& v) {
    auto shifted = [&](const RVec& dv) {
      return eff.apply(density_from_bloch({theta.n, theta.theta + dv}));
    };
    const double fp = fidelity(rho, shifted(v));
    const double fm = fidelity(rho, shifted(-v));
    return 4.0 * ((1.0 - std::sqrt(fp)) + (1.0 - std::sqrt(fm)));
  };
  RMat j = RMat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    RVec ei = RVec::Zero(m);
    ei(i) = step;
    j(i, i) = g(ei) / (step * step);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = i + 1; k < m; ++k) {
      RVec plus = RVec::Zero(m), minus = RVec::Zero(m);
      plus(i) = step;
      plus(k) = step;
      minus(i) = step;
      minus(k) = -step;
      j(i, k) = (g(plus) - g(minus)) / (4.0 * step * step);
      j(k, i) = j(i, k);
    }
  }
  return j;
}

}  // namespace qemb

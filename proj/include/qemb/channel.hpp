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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qemb/pauli.hpp"

namespace qemb {

/**
 * Pauli transfer matrix in the basis P_c / sqrt(2^n), identity first.
 *
 * full(i, j) = 2^-n tr[P_i E(P_j)]. The block below the identity row splits
 * into the unital part A = full[1:, 1:] and the translation column
 * full[1:, 0]. On generalized Bloch vectors the channel acts as
 * theta -> A theta + c with c = 2^((1-n)/2) full[1:, 0]; for one qubit the two
 * coincide.
 */
struct TransferMap {
  int n = 1;
  RMat full;

  static TransferMap identity(int n) {
    check_qubits(n);
    const auto dim = static_cast<Eigen::Index>(pow4(n));
    return {n, RMat::Identity(dim, dim)};
  }

  Eigen::Index dim() const { return full.rows(); }

  RMat A() const { return full.bottomRightCorner(dim() - 1, dim() - 1); }

  /// full[1:, 0]
  RVec translation_column() const { return full.col(0).tail(dim() - 1); }

  /// Translation in Bloch units.
  RVec c() const { return std::pow(2.0, (1.0 - n) / 2.0) * translation_column(); }

  bool is_trace_preserving(double tol = 1e-10) const {
    RVec row = full.row(0).transpose();
    row(0) -= 1.0;
    return row.cwiseAbs().maxCoeff() <= tol;
  }

  bool is_unital(double tol = 1e-10) const { return translation_column().cwiseAbs().maxCoeff() <= tol; }

  BlochVector apply(const BlochVector& b) const {
    if (b.n != n) throw ValidationError("Bloch vector qubit count does not match channel");
    return {n, A() * b.theta + c()};
  }

  /// Action on an arbitrary operator through its Pauli coordinates.
  CMat apply(const CMat& m) const {
    if (m.rows() != static_cast<Eigen::Index>(pow2(n))) throw ValidationError("operator dimension mismatch");
    const CVec v = pauli_coordinates(m);
    return operator_from_pauli_coordinates(n, full.cast<cplx>() * v);
  }

  /// Hilbert-Schmidt adjoint action.
  CMat apply_adjoint(const CMat& m) const {
    if (m.rows() != static_cast<Eigen::Index>(pow2(n))) throw ValidationError("operator dimension mismatch");
    const CVec v = pauli_coordinates(m);
    return operator_from_pauli_coordinates(n, full.transpose().cast<cplx>() * v);
  }
};

/**
 * Kraus form sum_k w_k K_k X K_k^dagger. Signed weights let the same type hold
 * the non-CP inverses of noise channels.
 */
struct KrausChannel {
  int n = 1;
  std::vector<CMat> kraus;
  std::vector<double> weights;
  bool cptp = true;

  KrausChannel() = default;
  KrausChannel(int n_, std::vector<CMat> ops, std::vector<double> w = {}, bool cptp_ = true)
      : n(n_), kraus(std::move(ops)), weights(std::move(w)), cptp(cptp_) {
    if (weights.empty()) weights.assign(kraus.size(), 1.0);
    validate();
  }

  void validate() const {
    check_qubits(n);
    if (weights.size() != kraus.size()) throw ValidationError("Kraus weight count mismatch");
    const auto d = static_cast<Eigen::Index>(pow2(n));
    for (const auto& k : kraus) {
      if (k.rows() != d || k.cols() != d) throw ValidationError("Kraus operator dimension mismatch");
    }
  }

  CMat apply(const CMat& rho) const {
    CMat out = CMat::Zero(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < kraus.size(); ++i) out += weights[i] * kraus[i] * rho * kraus[i].adjoint();
    return out;
  }

  /// sum_k w_k K^dagger K
  CMat completeness() const {
    const auto d = static_cast<Eigen::Index>(pow2(n));
    CMat s = CMat::Zero(d, d);
    for (std::size_t i = 0; i < kraus.size(); ++i) s += weights[i] * kraus[i].adjoint() * kraus[i];
    return s;
  }

  bool all_weights_positive() const {
    return std::all_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
  }
};

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

inline TransferMap ptm_from_kraus(const KrausChannel& ch) {
  ch.validate();
  const int n = ch.n;
  const auto dim = static_cast<Eigen::Index>(pow4(n));
  const double d = static_cast<double>(pow2(n));
  TransferMap t{n, RMat::Zero(dim, dim)};
  for (std::uint64_t j = 0; j < pow4(n); ++j) {
    CMat image = CMat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < ch.kraus.size(); ++k) {
      image += ch.weights[k] * ch.kraus[k] * pauli_left_multiply({n, j}, ch.kraus[k].adjoint());
    }
    for (std::uint64_t i = 0; i < pow4(n); ++i) {
      t.full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pauli_trace({n, i}, image).real() / d;
    }
  }
  return t;
}

/// PTM of X -> U X U^dagger.
inline TransferMap ptm_from_unitary(const CMat& u) {
  const int n = qubits_from_dim(u.rows());
  const auto dim = static_cast<Eigen::Index>(pow4(n));
  const double d = static_cast<double>(pow2(n));
  const CMat u_dag = u.adjoint();
  TransferMap t{n, RMat::Zero(dim, dim)};
  for (std::uint64_t j = 0; j < pow4(n); ++j) {
    const CMat image = u * pauli_left_multiply({n, j}, u_dag);
    for (std::uint64_t i = 0; i < pow4(n); ++i) {
      t.full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pauli_trace({n, i}, image).real() / d;
    }
  }
  return t;
}

/// Choi matrix sum_ab |a><b| (x) E(|a><b|), row index a * d + r.
inline CMat choi_from_ptm(const TransferMap& t) {
  const int n = t.n;
  const std::uint64_t d = pow2(n);
  const auto dd = static_cast<Eigen::Index>(d * d);
  CMat choi = CMat::Zero(dd, dd);
  // Choi = (1/d) sum_ij T_ij P_j^T (x) P_i
  for (std::uint64_t i = 0; i < pow4(n); ++i) {
    const detail::PauliAction pi({n, i});
    for (std::uint64_t j = 0; j < pow4(n); ++j) {
      const double tij = t.full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (tij == 0.0) continue;
      const detail::PauliAction pj({n, j});
      for (std::uint64_t a = 0; a < d; ++a) {
        const cplx pa = pj.phase(a);
        for (std::uint64_t r = 0; r < d; ++r) {
          const auto row = static_cast<Eigen::Index>(a * d + (r ^ pi.x));
          const auto col = static_cast<Eigen::Index>((a ^ pj.x) * d + r);
          choi(row, col) += tij / static_cast<double>(d) * pa * pi.phase(r);
        }
      }
    }
  }
  return choi;
}

inline CMat choi_from_kraus(const KrausChannel& ch) {
  const std::uint64_t d = pow2(ch.n);
  const auto dd = static_cast<Eigen::Index>(d * d);
  CMat choi = CMat::Zero(dd, dd);
  for (std::size_t k = 0; k < ch.kraus.size(); ++k) {
    CVec v(dd);
    for (std::uint64_t a = 0; a < d; ++a) {
      for (std::uint64_t r = 0; r < d; ++r) {
        v(static_cast<Eigen::Index>(a * d + r)) = ch.kraus[k](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a));
      }
    }
    choi += ch.weights[k] * v * v.adjoint();
  }
  return choi;
}

/// Signed-weight Kraus set from the Choi eigendecomposition.
inline KrausChannel kraus_from_ptm(const TransferMap& t, double threshold = 1e-12) {
  const CMat choi = choi_from_ptm(t);
  const double scale = std::max(1.0, choi.cwiseAbs().maxCoeff());
  if (!is_hermitian(choi, 1e-9 * scale)) throw ValidationError("Choi matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (choi + choi.adjoint()));
  const auto& lam = es.eigenvalues();
  const double cut = threshold * std::max(1.0, lam.cwiseAbs().maxCoeff());
  const std::uint64_t d = pow2(t.n);
  std::vector<CMat> ops;
  std::vector<double> weights;
  // Largest |lambda| first so dominant terms come out first.
  for (Eigen::Index e = lam.size() - 1; e >= 0; --e) {
    if (std::abs(lam(e)) <= cut) continue;
    CVec v = es.eigenvectors().col(e);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v *= std::conj(v(big)) / std::abs(v(big));
    CMat k(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::uint64_t a = 0; a < d; ++a) {
      for (std::uint64_t r = 0; r < d; ++r) {
        k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) = v(static_cast<Eigen::Index>(a * d + r));
      }
    }
    ops.push_back(std::sqrt(std::abs(lam(e))) * k);
    weights.push_back(lam(e) > 0 ? 1.0 : -1.0);
  }
  const bool positive = std::all_of(weights.begin(), weights.end(), [](double w) { return w > 0; });
  return KrausChannel(t.n, std::move(ops), std::move(weights), positive && t.is_trace_preserving(1e-9));
}

// ---------------------------------------------------------------------------
// Algebra
// ---------------------------------------------------------------------------

/// Applies b first, then a.
inline TransferMap compose(const TransferMap& a, const TransferMap& b) {
  if (a.n != b.n) throw ValidationError("compose: qubit counts differ");
  return {a.n, a.full * b.full};
}

/// a on the leading qubits, b on the trailing ones.
inline TransferMap tensor(const TransferMap& a, const TransferMap& b) {
  check_qubits(a.n + b.n);
  return {a.n + b.n, kron(a.full, b.full)};
}

inline TransferMap tensor_power(const TransferMap& a, int copies) {
  TransferMap out = a;
  for (int i = 1; i < copies; ++i) out = tensor(out, a);
  return out;
}

inline TransferMap inverse_channel(const TransferMap& t, double singular_tol = 1e-12) {
  Eigen::BDCSVD<RMat> svd(t.full);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= singular_tol) {
    throw NonInvertibleError("transfer map is not injective", smin);
  }
  TransferMap inv{t.n, t.full.fullPivLu().inverse()};
  if (t.is_trace_preserving()) {
    inv.full.row(0).setZero();
    inv.full(0, 0) = 1.0;
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Noise metrics
// ---------------------------------------------------------------------------

/// Gamma = 1 / ||A||, spectral norm.
inline double noise_strength(const TransferMap& t) {
  const RMat a = t.A();
  Eigen::BDCSVD<RMat> svd(a);
  const double smax = svd.singularValues()(0);
  if (smax <= 0.0) throw ValidationError("unital part vanishes; noise strength undefined");
  return 1.0 / smax;
}

/// nu = ||T||_F^2 / d^2.
inline double nu(const TransferMap& inv) {
  const double d = static_cast<double>(pow2(inv.n));
  return inv.full.squaredNorm() / (d * d);
}

/// nu through tr[Choi^2] / d^2.
inline double nu_choi(const TransferMap& inv) {
  const double d = static_cast<double>(pow2(inv.n));
  const CMat choi = choi_from_ptm(inv);
  return (choi * choi).trace().real() / (d * d);
}

/// eta = tr[E(I)^2] / d^2 = (1/d) sum_i T_i0^2.
inline double eta(const TransferMap& inv) {
  const double d = static_cast<double>(pow2(inv.n));
  return inv.full.col(0).squaredNorm() / d;
}

namespace detail {

/// lambda_min(E(psi psi^dag)) for unit psi, and the Hellmann-Feynman gradient 2 (M - f) psi, M = E^dag(phi phi^dag).
inline double min_output_eigenvalue(const TransferMap& t, const CVec& psi, CVec* grad) {
  const CMat out = t.apply(CMat(psi * psi.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (out + out.adjoint()));
  const double f = es.eigenvalues()(0);
  if (grad) {
    const CVec phi = es.eigenvectors().col(0);
    const CMat m = t.apply_adjoint(CMat(phi * phi.adjoint()));
    *grad = 2.0 * (m * psi - f * psi);
  }
  return f;
}

/**
 * BFGS on the unit sphere (renormalizing after each step) starting at psi.
 * Block coordinate descent converges only linearly when the minimum output
 * is rank deficient; this refinement converges much faster there.
 */
inline std::pair<double, CVec> polish_min_output_eigenvalue(const TransferMap& t, CVec psi, int max_iter = 300) {
  const Eigen::Index d = psi.size();
  auto to_real = [d](const CVec& v) {
    RVec r(2 * d);
    r.head(d) = v.real();
    r.tail(d) = v.imag();
    return r;
  };
  auto to_complex = [d](const RVec& r) {
    CVec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = {r(i), r(d + i)};
    return v;
  };
  psi.normalize();
  CVec g;
  double f = min_output_eigenvalue(t, psi, &g);
  RVec x = to_real(psi), gx = to_real(g);
  RMat h = RMat::Identity(2 * d, 2 * d);
  for (int it = 0; it < max_iter && gx.norm() > 1e-15; ++it) {
    RVec dir = -h * gx;
    if (dir.dot(gx) >= 0) {
      h.setIdentity();
      dir = -gx;
    }
    double step = 1.0, f_new = f;
    RVec x_new = x;
    CVec g_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      x_new.normalize();
      f_new = min_output_eigenvalue(t, to_complex(x_new), &g_new);
      if (f_new <= f + 1e-4 * step * dir.dot(gx)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const RVec gx_new = to_real(g_new);
    const RVec sv = x_new - x, yv = gx_new - gx;
    const double sy = sv.dot(yv);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const RMat i_rsy = RMat::Identity(2 * d, 2 * d) - rho * sv * yv.transpose();
      h = i_rsy * h * i_rsy.transpose() + rho * sv * sv.transpose();
    }
    const bool stalled = f - f_new <= 1e-18 * std::max(1.0, std::abs(f));
    x = x_new;
    gx = gx_new;
    f = f_new;
    if (stalled && it > 5) break;
  }
  return {f, to_complex(x)};
}

}  // namespace detail

struct BetaResult {
  double value = 0.0;
  CVec state;  // pure input achieving the minimum
  bool condition_ii = false;
};

/**
 * beta = 2^n min_psi lambda_min(E(|psi><psi|)).
 *
 * lambda_min is concave in the input, so pure inputs suffice. The objective
 * <phi|E(psi psi^dag)|phi> is minimized by block coordinate descent: for fixed
 * psi the best phi is the lowest eigenvector of E(psi psi^dag), and for fixed
 * phi the best psi is the lowest eigenvector of E^dag(phi phi^dag). Each step
 * is exact, so the objective decreases monotonically. Restarts are drawn from
 * Haar-random pure states.
 */
inline BetaResult beta_margin(const TransferMap& t, int restarts = 32, std::uint64_t seed = 0x5eedbe7a,
                              double tol = 1e-9) {
  const auto d = static_cast<Eigen::Index>(pow2(t.n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  BetaResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < restarts; ++s) {
    CVec psi(d);
    for (Eigen::Index i = 0; i < d; ++i) psi(i) = {normal(rng), normal(rng)};
    psi.normalize();
    double last = std::numeric_limits<double>::infinity();
    double lam_min = last;
    for (int it = 0; it < 200; ++it) {
      const CMat out = t.apply(CMat(psi * psi.adjoint()));
      Eigen::SelfAdjointEigenSolver<CMat> es_out(0.5 * (out + out.adjoint()));
      lam_min = es_out.eigenvalues()(0);
      const CVec phi = es_out.eigenvectors().col(0);
      const CMat back = t.apply_adjoint(CMat(phi * phi.adjoint()));
      Eigen::SelfAdjointEigenSolver<CMat> es_back(0.5 * (back + back.adjoint()));
      psi = es_back.eigenvectors().col(0);
      if (last - lam_min < 1e-15) break;
      last = lam_min;
    }
    const auto polished = detail::polish_min_output_eigenvalue(t, psi);
    if (polished.first < lam_min) {
      lam_min = polished.first;
      psi = polished.second;
    }
    if (lam_min < best.value) {
      best.value = lam_min;
      best.state = psi;
    }
  }
  best.value = std::max(0.0, static_cast<double>(d) * best.value);
  best.condition_ii = best.value > tol;
  return best;
}

// ---------------------------------------------------------------------------
// Noise models
// ---------------------------------------------------------------------------

enum class NoiseKind { GlobalDepolarizing, LocalDepolarizing, LocalDephasing, AmplitudeDamping };

inline std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::GlobalDepolarizing: return "global-dep";
    case NoiseKind::LocalDepolarizing: return "local-dep";
    case NoiseKind::LocalDephasing: return "dephasing";
    case NoiseKind::AmplitudeDamping: return "amp-damping";
  }
  return "unknown";
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "global-dep" || s == "global_depolarizing" || s == "GlobalDepolarizing") return NoiseKind::GlobalDepolarizing;
  if (s == "local-dep" || s == "local_depolarizing" || s == "LocalDepolarizing") return NoiseKind::LocalDepolarizing;
  if (s == "dephasing" || s == "local-dephasing" || s == "LocalDephasing") return NoiseKind::LocalDephasing;
  if (s == "amp-damping" || s == "amplitude_damping" || s == "AmplitudeDamping") return NoiseKind::AmplitudeDamping;
  throw ValidationError("unknown noise kind '" + s + "'");
}

struct NoiseModel {
  NoiseKind kind = NoiseKind::GlobalDepolarizing;
  double p = 0.0;
  int n = 1;

  void validate() const {
    check_qubits(n);
    if (!(p >= 0.0 && p < 1.0)) throw ValidationError("error rate p must lie in [0, 1)");
  }

  bool is_local() const { return kind != NoiseKind::GlobalDepolarizing; }
  bool is_unital() const { return kind != NoiseKind::AmplitudeDamping; }
};

/// Single-qubit PTM of a local model.
inline TransferMap single_qubit_noise(NoiseKind kind, double p) {
  RMat t = RMat::Identity(4, 4);
  switch (kind) {
    case NoiseKind::GlobalDepolarizing:
    case NoiseKind::LocalDepolarizing:
      t.diagonal() << 1.0, 1.0 - p, 1.0 - p, 1.0 - p;
      break;
    case NoiseKind::LocalDephasing:
      t.diagonal() << 1.0, 1.0 - p, 1.0 - p, 1.0;
      break;
    case NoiseKind::AmplitudeDamping:
      t.diagonal() << 1.0, std::sqrt(1.0 - p), std::sqrt(1.0 - p), 1.0 - p;
      t(3, 0) = p;
      break;
  }
  return {1, t};
}

/// Layer-wide transfer map; local models are tensored over all qubits.
inline TransferMap make_noise(const NoiseModel& model) {
  model.validate();
  if (model.kind == NoiseKind::GlobalDepolarizing) {
    TransferMap t = TransferMap::identity(model.n);
    t.full.diagonal().tail(t.dim() - 1).setConstant(1.0 - model.p);
    return t;
  }
  return tensor_power(single_qubit_noise(model.kind, model.p), model.n);
}

inline KrausChannel single_qubit_noise_kraus(NoiseKind kind, double p) {
  const CMat id = CMat::Identity(2, 2);
  switch (kind) {
    case NoiseKind::GlobalDepolarizing:
    case NoiseKind::LocalDepolarizing:
      return KrausChannel(1, {std::sqrt(1.0 - 0.75 * p) * id, std::sqrt(p / 4) * pauli_matrix({1, 1}),
                              std::sqrt(p / 4) * pauli_matrix({1, 2}), std::sqrt(p / 4) * pauli_matrix({1, 3})});
    case NoiseKind::LocalDephasing:
      return KrausChannel(1, {std::sqrt(1.0 - 0.5 * p) * id, std::sqrt(p / 2) * pauli_matrix({1, 3})});
    case NoiseKind::AmplitudeDamping: {
      CMat e1 = CMat::Zero(2, 2), e2 = CMat::Zero(2, 2);
      e1(0, 0) = 1.0;
      e1(1, 1) = std::sqrt(1.0 - p);
      e2(0, 1) = std::sqrt(p);
      return KrausChannel(1, {e1, e2});
    }
  }
  throw ValidationError("unknown noise kind");
}

inline KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<CMat> ops;
  std::vector<double> w;
  for (std::size_t i = 0; i < a.kraus.size(); ++i) {
    for (std::size_t j = 0; j < b.kraus.size(); ++j) {
      ops.push_back(kron(a.kraus[i], b.kraus[j]));
      w.push_back(a.weights[i] * b.weights[j]);
    }
  }
  return KrausChannel(a.n + b.n, std::move(ops), std::move(w), a.cptp && b.cptp);
}

/// Kraus operators of a built-in model; the operator count grows as 4^n, so n <= 4.
inline KrausChannel noise_kraus(const NoiseModel& model) {
  model.validate();
  check_qubits(model.n, 4);
  if (model.kind == NoiseKind::GlobalDepolarizing) {
    const double d2 = static_cast<double>(pow4(model.n));
    std::vector<CMat> ops;
    ops.push_back(std::sqrt(1.0 - model.p + model.p / d2) * pauli_matrix({model.n, 0}));
    for (const auto& ps : pauli_basis(model.n)) ops.push_back(std::sqrt(model.p / d2) * pauli_matrix(ps));
    return KrausChannel(model.n, std::move(ops));
  }
  KrausChannel one = single_qubit_noise_kraus(model.kind, model.p);
  KrausChannel out = one;
  for (int i = 1; i < model.n; ++i) out = tensor(out, one);
  return out;
}

/**
 * beta for a built-in model. Global depolarizing has the exact value p; the
 * dephasing and amplitude-damping models map some pure input to a pure or
 * rank-deficient output, so beta = 0. Local depolarizing is computed
 * numerically.
 */
inline double model_beta(const NoiseModel& model) {
  model.validate();
  switch (model.kind) {
    case NoiseKind::GlobalDepolarizing: return model.p;
    case NoiseKind::LocalDephasing:
    case NoiseKind::AmplitudeDamping: return 0.0;
    case NoiseKind::LocalDepolarizing: return beta_margin(make_noise(model)).value;
  }
  return 0.0;
}

}  // namespace qemb

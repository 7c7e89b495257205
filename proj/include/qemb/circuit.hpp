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
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qemb/channel.hpp"
#include "qemb/clifford.hpp"

namespace qemb {

enum class Ensemble { Haar, CliffordUniform, TwoQubitRandomPairs, HardwareEfficient };

inline std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::Haar: return "haar";
    case Ensemble::CliffordUniform: return "clifford";
    case Ensemble::TwoQubitRandomPairs: return "pairs";
    case Ensemble::HardwareEfficient: return "hardware-efficient";
  }
  return "unknown";
}

inline Ensemble ensemble_from_string(const std::string& s) {
  if (s == "haar" || s == "Haar") return Ensemble::Haar;
  if (s == "clifford" || s == "CliffordUniform") return Ensemble::CliffordUniform;
  if (s == "pairs" || s == "two-qubit-pairs" || s == "TwoQubitRandomPairs") return Ensemble::TwoQubitRandomPairs;
  if (s == "hardware-efficient" || s == "hea" || s == "HardwareEfficient") return Ensemble::HardwareEfficient;
  throw ValidationError("unknown ensemble '" + s + "'");
}

struct EnsembleKind {
  Ensemble kind = Ensemble::Haar;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Haar-random d x d unitary: QR of a complex Ginibre matrix with R-diagonal phases removed.
inline CMat haar_unitary(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = {normal(rng), normal(rng)};
  }
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ() * CMat::Identity(d, d);
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const cplx rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= mag > 0 ? rjj / mag : cplx{1.0, 0.0};
  }
  return q;
}

inline CMat rotation_y(double angle) {
  CMat m(2, 2);
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << c, -s, s, c;
  return m;
}

inline CMat rotation_z(double angle) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -angle / 2);
  m(1, 1) = std::polar(1.0, angle / 2);
  return m;
}

/// Embeds a 4x4 unitary acting on qubits (a, b), a as the leading factor.
inline CMat embed_two_qubit(const CMat& u, int a, int b, int n) {
  const auto d = static_cast<Eigen::Index>(pow2(n));
  const int sa = n - 1 - a, sb = n - 1 - b;
  CMat out = CMat::Zero(d, d);
  for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(d); ++k) {
    const std::uint64_t in_local = (((k >> sa) & 1U) << 1) | ((k >> sb) & 1U);
    const std::uint64_t rest = k & ~((std::uint64_t{1} << sa) | (std::uint64_t{1} << sb));
    for (std::uint64_t o = 0; o < 4; ++o) {
      const std::uint64_t j = rest | (((o >> 1) & 1U) << sa) | ((o & 1U) << sb);
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          u(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(in_local));
    }
  }
  return out;
}

/**
 * One hardware-efficient layer: RY(a) RZ(b) on every qubit with angles uniform
 * in [0, 2 pi), then CZ on nearest-neighbour pairs (q, q+1) with q of the
 * layer's parity. When the odd brick is empty (n = 2) the even one is used.
 */
inline CMat hardware_efficient_layer(int n, std::size_t layer_index, std::mt19937_64& rng) {
  if (n < 2) throw ValidationError("hardware-efficient ensemble needs n >= 2");
  check_qubits(n);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  CMat u = CMat::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const double a = angle(rng), b = angle(rng);
    u = kron(u, CMat(rotation_y(a) * rotation_z(b)));
  }
  int start = static_cast<int>(layer_index % 2);
  if (start + 1 >= n) start = 0;
  const auto d = static_cast<Eigen::Index>(pow2(n));
  for (Eigen::Index k = 0; k < d; ++k) {
    int parity = 0;
    for (int q = start; q + 1 < n; q += 2) {
      const auto bits = static_cast<std::uint64_t>(k);
      parity ^= static_cast<int>(((bits >> (n - 1 - q)) & 1U) & ((bits >> (n - 2 - q)) & 1U));
    }
    if (parity) u.row(k) *= -1.0;
  }
  return u;
}

/// Random (near-)perfect matching of the qubits with an independent Haar 4x4 unitary per pair.
inline CMat random_pairs_layer(int n, std::mt19937_64& rng) {
  if (n < 2) throw ValidationError("two-qubit pair ensemble needs n >= 2");
  check_qubits(n);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto d = static_cast<Eigen::Index>(pow2(n));
  CMat u = CMat::Identity(d, d);
  for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
    u = embed_two_qubit(haar_unitary(4, rng), order[i], order[i + 1], n) * u;
  }
  return u;
}

inline CMat sample_unitary(Ensemble kind, int n, std::mt19937_64& rng, std::size_t layer_index = 0) {
  check_qubits(n);
  switch (kind) {
    case Ensemble::Haar: return haar_unitary(static_cast<Eigen::Index>(pow2(n)), rng);
    case Ensemble::CliffordUniform: return random_clifford(n, rng);
    case Ensemble::TwoQubitRandomPairs: return random_pairs_layer(n, rng);
    case Ensemble::HardwareEfficient: return hardware_efficient_layer(n, layer_index, rng);
  }
  throw ValidationError("unsupported ensemble");
}

// ---------------------------------------------------------------------------
// Circuits
// ---------------------------------------------------------------------------

struct CircuitLayer {
  CMat unitary;
  TransferMap noise;
};

struct LayeredCircuit {
  int n = 1;
  std::vector<CircuitLayer> layers;
  DensityMatrix initial_state;

  explicit LayeredCircuit(int n_ = 1) : n(n_), initial_state(zero_state(n_)) {}

  std::size_t depth() const { return layers.size(); }

  void add_layer(CMat u, TransferMap noise) {
    const auto d = static_cast<Eigen::Index>(pow2(n));
    if (u.rows() != d || u.cols() != d) throw ValidationError("unitary layer dimension mismatch");
    if (!is_unitary(u)) throw ValidationError("layer is not unitary");
    if (noise.n != n) throw ValidationError("noise layer qubit count mismatch");
    layers.push_back({std::move(u), std::move(noise)});
  }
};

struct EffectiveChannel {
  TransferMap map;
  CMat ideal_unitary;
};

/// L layers from the ensemble, each followed by the same noise map.
inline LayeredCircuit random_circuit(int n, std::size_t depth, Ensemble ens, const TransferMap& noise,
                                     std::mt19937_64& rng) {
  LayeredCircuit c(n);
  for (std::size_t l = 0; l < depth; ++l) c.add_layer(sample_unitary(ens, n, rng, l), noise);
  return c;
}

/// E' with noisy output = E'(ideal output); T'_l = T_E T_U T'_{l-1} T_U^T.
inline EffectiveChannel compile_effective(const LayeredCircuit& circ) {
  const auto d = static_cast<Eigen::Index>(pow2(circ.n));
  EffectiveChannel eff{TransferMap::identity(circ.n), CMat::Identity(d, d)};
  for (const auto& layer : circ.layers) {
    const TransferMap tu = ptm_from_unitary(layer.unitary);
    eff.map.full = layer.noise.full * (tu.full * eff.map.full * tu.full.transpose());
    eff.ideal_unitary = layer.unitary * eff.ideal_unitary;
  }
  return eff;
}

inline DensityMatrix ideal_output(const LayeredCircuit& circ) {
  CMat u = CMat::Identity(circ.initial_state.rows(), circ.initial_state.cols());
  for (const auto& layer : circ.layers) u = layer.unitary * u;
  return u * circ.initial_state * u.adjoint();
}

/// Layer-by-layer density-matrix simulation.
inline DensityMatrix noisy_output(const LayeredCircuit& circ) {
  DensityMatrix rho = circ.initial_state;
  for (const auto& layer : circ.layers) {
    rho = layer.unitary * rho * layer.unitary.adjoint();
    rho = layer.noise.apply(rho);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Singular exponents
// ---------------------------------------------------------------------------

struct SingularExponents {
  RVec k;  // ascending
  double k_geo = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
};

/// k_i = ln sigma_i / (L ln(1 - p)) from log singular values.
inline SingularExponents exponents_from_log_sigma(const RVec& log_sigma, double p, std::size_t depth) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("singular exponents need p in (0, 1)");
  if (depth == 0) throw ValidationError("singular exponents need L >= 1");
  const double denom = static_cast<double>(depth) * std::log1p(-p);
  SingularExponents out;
  out.k = log_sigma / denom;
  std::sort(out.k.begin(), out.k.end());
  out.k_geo = out.k.mean();
  out.k_min = out.k(0);
  out.k_max = out.k(out.k.size() - 1);
  return out;
}

inline SingularExponents singular_exponents(const EffectiveChannel& eff, double p, std::size_t depth) {
  Eigen::BDCSVD<RMat> svd(eff.map.A());
  const RVec s = svd.singularValues();
  if (s.minCoeff() <= 0.0) throw NonInvertibleError("unital part of the effective channel is singular", s.minCoeff());
  return exponents_from_log_sigma(s.array().log().matrix(), p, depth);
}

/**
 * Singular values of the unital part of a deep circuit in log domain.
 *
 * A'_L = A_E A_U ... A_E A_U (times an orthogonal factor on the right, which
 * does not change singular values) is kept as Q D T: Q orthogonal, D diagonal
 * stored as log d_i, T with unit rows. Each layer multiplies into Q and is
 * re-split by a QR of the columns ordered by their scale, so directions that
 * contract at different rates never share a floating-point exponent. A single
 * running scale would lose every singular value more than ~1e-16 below the
 * largest one.
 */
class UnitalPartTracker {
 public:
  explicit UnitalPartTracker(int n)
      : n_(n),
        q_(RMat::Identity(static_cast<Eigen::Index>(pow4(n) - 1), static_cast<Eigen::Index>(pow4(n) - 1))),
        t_(q_),
        log_d_(RVec::Zero(q_.rows())) {}

  void push(const RMat& a_noise, const RMat& a_unitary) {
    const RMat c = a_noise * (a_unitary * q_);
    const Eigen::Index m = c.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    RVec key(m);
    for (Eigen::Index j = 0; j < m; ++j) key(j) = log_d_(j) + std::log(c.col(j).norm());
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return key(a) > key(b); });

    RMat cp(m, m), rows(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      cp.col(i) = c.col(order[static_cast<std::size_t>(i)]);
      rows.row(i) = t_.row(order[static_cast<std::size_t>(i)]);
    }
    const Eigen::HouseholderQR<RMat> qr(cp);
    const RMat& r = qr.matrixQR();
    q_ = qr.householderQ();

    RVec log_d(m);
    RMat step = RMat::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double rii = std::abs(r(i, i));
      if (!(rii > 0.0)) throw NonInvertibleError("unital part of the effective channel is singular", rii);
      const double li = log_d_(order[static_cast<std::size_t>(i)]);
      log_d(i) = li + std::log(rii);
      for (Eigen::Index j = i; j < m; ++j) {
        step(i, j) = r(i, j) / rii * std::exp(log_d_(order[static_cast<std::size_t>(j)]) - li);
      }
    }
    t_ = step * rows;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double norm = t_.row(i).norm();
      t_.row(i) /= norm;
      log_d(i) += std::log(norm);
    }
    log_d_ = log_d;
    ++depth_;
  }

  /**
   * ln sigma_i of D T by one-sided Jacobi on the columns d_i t_i of (D T)^T.
   * Each column is a log scale times a unit vector, and the rotations are
   * written relative to the larger scale so nothing under- or overflows.
   */
  RVec log_singular_values() const {
    const Eigen::Index m = t_.rows();
    std::vector<RVec> u(static_cast<std::size_t>(m));
    RVec ls = log_d_;
    for (Eigen::Index i = 0; i < m; ++i) u[static_cast<std::size_t>(i)] = t_.row(i).transpose();
    for (int sweep = 0; sweep < 100; ++sweep) {
      bool rotated = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
          auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
          if (ls(j) > ls(i)) std::swap(a, b);
          const double g = u[a].dot(u[b]);
          if (std::abs(g) <= 1e-15) continue;
          rotated = true;
          const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
          const double r = ls(ib) - ls(ia);
          const double e2r = std::exp(2.0 * r);
          const double z = (e2r - 1.0) / (2.0 * g);
          const double th = 1.0 / (z + std::copysign(std::sqrt(e2r + z * z), z));
          const double t = th * std::exp(r);
          const double cs = 1.0 / std::sqrt(1.0 + t * t);
          RVec na = cs * (u[a] - th * e2r * u[b]);
          RVec nb = cs * (th * u[a] + u[b]);
          const double norm_a = na.norm(), norm_b = nb.norm();
          ls(ia) += std::log(norm_a);
          ls(ib) += std::log(norm_b);
          u[a] = na / norm_a;
          u[b] = nb / norm_b;
        }
      }
      if (!rotated) break;
    }
    std::sort(ls.begin(), ls.end(), std::greater<>());
    return ls;
  }

  std::size_t depth() const { return depth_; }
  int n() const { return n_; }

 private:
  int n_;
  RMat q_;
  RMat t_;
  RVec log_d_;
  std::size_t depth_ = 0;
};

/// Exponent k_mean whose (1-p)^(k_mean L) is the geometric mean of the singular values.
inline double k_mean_theory(const NoiseModel& model) {
  const double n = model.n;
  const double q = static_cast<double>(pow4(model.n));
  switch (model.kind) {
    case NoiseKind::GlobalDepolarizing: return 1.0;
    case NoiseKind::LocalDepolarizing: return 3.0 * n * (q / 4.0) / (q - 1.0);
    case NoiseKind::LocalDephasing:
    case NoiseKind::AmplitudeDamping: return 2.0 * n * (q / 4.0) / (q - 1.0);
  }
  return 1.0;
}

struct ConvergenceRow {
  std::size_t depth = 0;
  double k_geo = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
};

/**
 * Singular exponents of the effective channel at the requested depths (sorted
 * ascending) for one random circuit drawn from the ensemble.
 */
inline std::vector<ConvergenceRow> convergence_run(const NoiseModel& model, Ensemble ens,
                                                   const std::vector<std::size_t>& depths, std::uint64_t seed) {
  if (!std::is_sorted(depths.begin(), depths.end())) throw ValidationError("depths must be sorted");
  std::mt19937_64 rng(seed);
  const RMat a_noise = make_noise(model).A();
  UnitalPartTracker tracker(model.n);
  std::vector<ConvergenceRow> rows;
  std::size_t next = 0;
  const std::size_t max_depth = depths.empty() ? 0 : depths.back();
  for (std::size_t l = 0; l < max_depth; ++l) {
    const TransferMap tu = ptm_from_unitary(sample_unitary(ens, model.n, rng, l));
    tracker.push(a_noise, tu.A());
    while (next < depths.size() && depths[next] == l + 1) {
      const auto e = exponents_from_log_sigma(tracker.log_singular_values(), model.p, l + 1);
      rows.push_back({l + 1, e.k_geo, e.k_min, e.k_max});
      ++next;
    }
  }
  return rows;
}

}  // namespace qemb

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
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qemb/bounds.hpp"
#include "qemb/circuit.hpp"

namespace qemb {

struct MomentCheck {
  std::string name;
  double lhs = 0.0;  // Monte-Carlo mean
  double rhs = 0.0;  // closed form
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  double sigmas = 4.0;

  double z() const { return stderr_ > 0 ? (lhs - rhs) / stderr_ : (lhs == rhs ? 0.0 : INFINITY); }
  bool passed() const { return std::abs(lhs - rhs) <= sigmas * stderr_; }
};

/// (Wg([1,1]), Wg([2])) for degree two.
inline std::pair<double, double> weingarten2(double d) {
  if (d < 2.0) throw ValidationError("weingarten2: d >= 2 required");
  return {1.0 / (d * d - 1.0), -1.0 / (d * (d * d - 1.0))};
}

enum class MomentPattern { Trace4, Trace2x2 };

/**
 * Haar averages
 *   Trace4:   E tr[U A U^dag B U C U^dag D]
 *   Trace2x2: E tr[U A U^dag B] tr[U C U^dag D]
 */
inline double second_moment_rhs(const CMat& a, const CMat& b, const CMat& c, const CMat& d_, MomentPattern pattern) {
  const Eigen::Index d = a.rows();
  for (const CMat* m : {&a, &b, &c, &d_}) {
    if (m->rows() != d || m->cols() != d) throw ValidationError("second_moment_rhs: dimension mismatch");
  }
  const auto [w11, w2] = weingarten2(static_cast<double>(d));
  const cplx ta = a.trace(), tb = b.trace(), tc = c.trace(), td = d_.trace();
  const cplx tac = (a * c).trace(), tbd = (b * d_).trace();
  cplx v;
  if (pattern == MomentPattern::Trace4) {
    v = w11 * (ta * tc * tbd + tac * tb * td) + w2 * (tac * tbd + ta * tb * tc * td);
  } else {
    v = w11 * (ta * tc * tb * td + tac * tbd) + w2 * (tac * tb * td + ta * tc * tbd);
  }
  return v.real();
}

namespace detail {

inline CMat random_hermitian(Eigen::Index d, std::mt19937_64& rng, bool traceless) {
  std::normal_distribution<double> normal;
  CMat g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = {normal(rng), normal(rng)};
  }
  CMat h = 0.5 * (g + g.adjoint());
  if (traceless) h -= (h.trace() / static_cast<double>(d)) * CMat::Identity(d, d);
  return h;
}

struct Accumulator {
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  double stderr_() const {
    return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace detail

/**
 * First- and second-moment checks of a unitary sampler against the Haar
 * formulas. Test matrices are drawn once from `seed`; the Pauli-structured
 * check uses A = C = B = D = Z on qubit 0.
 */
inline std::vector<MomentCheck> verify_design(Ensemble ens, int n, std::size_t n_samples, std::uint64_t seed,
                                              double sigmas = 4.0) {
  check_qubits(n);
  const auto d = static_cast<Eigen::Index>(pow2(n));
  std::mt19937_64 mat_rng(seed ^ 0xa5a5a5a5ULL);
  const CMat a1 = detail::random_hermitian(d, mat_rng, false), b1 = detail::random_hermitian(d, mat_rng, false);
  const CMat a = detail::random_hermitian(d, mat_rng, true), b = detail::random_hermitian(d, mat_rng, true);
  const CMat c = detail::random_hermitian(d, mat_rng, true), dd = detail::random_hermitian(d, mat_rng, true);
  const CMat z0 = observable_matrix(single_z(n, 0));

  detail::Accumulator u00, first, t4, t22, zz;
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const CMat u = sample_unitary(ens, n, rng, 0);
    const CMat ud = u.adjoint();
    u00.add(std::norm(u(0, 0)));
    first.add((u * a1 * ud * b1).trace().real());
    const CMat uau = u * a * ud, ucu = u * c * ud;
    t4.add((uau * b * ucu * dd).trace().real());
    t22.add(((uau * b).trace() * (ucu * dd).trace()).real());
    const cplx tz = (u * z0 * ud * z0).trace();
    zz.add(std::norm(tz));
  }
  const double dim = static_cast<double>(d);
  auto make = [&](const std::string& name, const detail::Accumulator& acc, double rhs) {
    return MomentCheck{name, acc.mean, rhs, acc.stderr_(), acc.count, sigmas};
  };
  return {
      make("first:|U00|^2", u00, 1.0 / dim),
      make("first:tr[UAU^dag B]", first, (a1.trace() * b1.trace()).real() / dim),
      make("second:trace4", t4, second_moment_rhs(a, b, c, dd, MomentPattern::Trace4)),
      make("second:trace2x2", t22, second_moment_rhs(a, b, c, dd, MomentPattern::Trace2x2)),
      make("second:pauli-zz", zz, second_moment_rhs(z0, z0, z0, z0, MomentPattern::Trace2x2)),
  };
}

inline bool all_passed(const std::vector<MomentCheck>& checks) {
  for (const auto& c : checks) {
    if (!c.passed()) return false;
  }
  return true;
}

/**
 * Monte-Carlo check of the Haar-averaged nu (and eta) recursion: samples
 * depth-L circuits with Haar layers and the given noise, and compares the mean
 * nu, eta of the inverse effective channel with the recursion started from
 * the identity (nu = 1, eta = 1/d). The eta check is emitted for non-unital
 * noise only.
 */
inline std::vector<MomentCheck> mc_nu_recursion_check(const TransferMap& noise_layer, std::size_t depth,
                                                      std::size_t n_samples, std::uint64_t seed, double sigmas = 3.0) {
  const int n = noise_layer.n;
  const double d = static_cast<double>(pow2(n));
  const TransferMap inv = inverse_channel(noise_layer);
  const double nu_l = nu(inv), eta_l = eta(inv);
  const bool unital = noise_layer.is_unital();
  double nu_pred = 1.0, eta_pred = 1.0 / d;
  for (std::size_t l = 0; l < depth; ++l) {
    if (unital) {
      nu_pred = nu_recursion(nu_pred, nu_l, d);
    } else {
      std::tie(nu_pred, eta_pred) = nu_eta_recursion(nu_pred, eta_pred, nu_l, eta_l, d);
    }
  }
  detail::Accumulator acc_nu, acc_eta;
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const LayeredCircuit circ = random_circuit(n, depth, Ensemble::Haar, noise_layer, rng);
    const TransferMap eff_inv = inverse_channel(compile_effective(circ).map);
    acc_nu.add(nu(eff_inv));
    acc_eta.add(eta(eff_inv));
  }
  auto se = [](const detail::Accumulator& a) { return std::max(a.stderr_(), 1e-12); };
  std::vector<MomentCheck> out;
  out.push_back({"nu-recursion", acc_nu.mean, nu_pred, se(acc_nu), acc_nu.count, sigmas});
  if (!unital) out.push_back({"eta-recursion", acc_eta.mean, eta_pred, se(acc_eta), acc_eta.count, sigmas});
  return out;
}

}  // namespace qemb

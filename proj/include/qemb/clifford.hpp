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

#include <bit>
#include <random>
#include <vector>

#include "qemb/pauli.hpp"

namespace qemb {

/// Pauli operator sign * (Hermitian Pauli with bits x, z); bit k of x or z is qubit k.
struct SignedPauli {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  int sign = 1;

  PauliString string(int n) const {
    std::uint64_t code = 0;
    for (int q = 0; q < n; ++q) {
      const bool xb = (x >> q) & 1U, zb = (z >> q) & 1U;
      const std::uint64_t d = xb ? (zb ? 2 : 1) : (zb ? 3 : 0);
      code = code * 4 + d;
    }
    return {n, code};
  }
};

/// Symplectic product of two packed (x | z << n) vectors.
inline int symplectic_product(std::uint64_t a, std::uint64_t b, int n) {
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  const std::uint64_t ax = a & mask, az = a >> n, bx = b & mask, bz = b >> n;
  return (std::popcount(ax & bz) + std::popcount(az & bx)) & 1;
}

/**
 * Clifford tableau: images of X_k and Z_k under conjugation.
 */
struct CliffordTableau {
  int n = 1;
  std::vector<SignedPauli> x_images;
  std::vector<SignedPauli> z_images;
};

/**
 * Uniformly random Clifford (modulo global phase).
 *
 * The symplectic part is a uniformly random symplectic basis built pair by
 * pair: x_k is uniform among nonzero vectors orthogonal to all earlier pairs,
 * then z_k is uniform among such vectors with <x_k, z_k> = 1. The number of
 * choices at each step does not depend on earlier choices, so every basis is
 * equally likely. Independent uniform signs supply the Pauli part.
 */
inline CliffordTableau random_clifford_tableau(int n, std::mt19937_64& rng) {
  check_qubits(n);
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  std::uniform_int_distribution<std::uint64_t> vec_dist(1, pow4(n) - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint64_t> chosen;
  CliffordTableau tab{n, {}, {}};
  auto orthogonal_to_chosen = [&](std::uint64_t v) {
    for (auto w : chosen) {
      if (symplectic_product(v, w, n)) return false;
    }
    return true;
  };
  for (int k = 0; k < n; ++k) {
    std::uint64_t xv = 0, zv = 0;
    do {
      xv = vec_dist(rng);
    } while (!orthogonal_to_chosen(xv));
    do {
      zv = vec_dist(rng);
    } while (!orthogonal_to_chosen(zv) || !symplectic_product(xv, zv, n));
    chosen.push_back(xv);
    chosen.push_back(zv);
    tab.x_images.push_back({xv & mask, xv >> n, coin(rng) ? -1 : 1});
    tab.z_images.push_back({zv & mask, zv >> n, coin(rng) ? -1 : 1});
  }
  return tab;
}

namespace detail {

inline CVec apply_signed_pauli(const SignedPauli& p, int n, const CVec& v) {
  const PauliAction act(p.string(n));
  CVec out(v.size());
  for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(v.size()); ++k) {
    out(static_cast<Eigen::Index>(k ^ act.x)) = static_cast<double>(p.sign) * act.phase(k) * v(static_cast<Eigen::Index>(k));
  }
  return out;
}

}  // namespace detail

/**
 * Dense unitary U with U X_k U^dag = x_images[k] and U Z_k U^dag = z_images[k].
 *
 * Column 0 is the joint +1 eigenvector of the Z images; column b is obtained
 * by applying the X images selected by the bits of b.
 */
inline CMat clifford_unitary(const CliffordTableau& tab) {
  const int n = tab.n;
  const auto d = static_cast<Eigen::Index>(pow2(n));
  CVec psi0;
  for (Eigen::Index start = 0; start < d; ++start) {
    CVec v = CVec::Zero(d);
    v(start) = 1.0;
    for (int k = 0; k < n; ++k) v = 0.5 * (v + detail::apply_signed_pauli(tab.z_images[static_cast<std::size_t>(k)], n, v));
    if (v.norm() > 1e-6) {
      psi0 = v.normalized();
      break;
    }
  }
  if (psi0.size() == 0) throw ValidationError("Clifford tableau has no stabilizer state");
  CMat u(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    CVec col = psi0;
    for (int k = 0; k < n; ++k) {
      // qubit k is bit n-1-k of the basis index
      if ((static_cast<std::uint64_t>(b) >> (n - 1 - k)) & 1U) {
        col = detail::apply_signed_pauli(tab.x_images[static_cast<std::size_t>(k)], n, col);
      }
    }
    u.col(b) = col;
  }
  return u;
}

inline CMat random_clifford(int n, std::mt19937_64& rng) { return clifford_unitary(random_clifford_tableau(n, rng)); }

}  // namespace qemb

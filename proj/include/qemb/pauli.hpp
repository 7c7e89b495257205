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
#include <cmath>
#include <string>
#include <vector>

#include "qemb/core.hpp"

namespace qemb {

/**
 * An n-qubit Pauli string stored as a base-4 code.
 *
 * Digit values are 0:I, 1:X, 2:Y, 3:Z. Qubit 0 is the most significant
 * digit, and also the most significant bit of the computational basis index,
 * so the matrix of a string is sigma_{d0} (x) sigma_{d1} (x) ... in kron order.
 */
struct PauliString {
  int n = 1;
  std::uint64_t code = 0;

  int digit(int qubit) const { return static_cast<int>((code >> (2 * (n - 1 - qubit))) & 3U); }

  int weight() const {
    int w = 0;
    for (int q = 0; q < n; ++q) w += digit(q) != 0;
    return w;
  }

  std::string label() const {
    std::string s(static_cast<std::size_t>(n), 'I');
    for (int q = 0; q < n; ++q) s[static_cast<std::size_t>(q)] = "IXYZ"[digit(q)];
    return s;
  }

  /// Bits of the basis index flipped by the string.
  std::uint64_t x_mask() const {
    std::uint64_t m = 0;
    for (int q = 0; q < n; ++q) {
      const int d = digit(q);
      if (d == 1 || d == 2) m |= std::uint64_t{1} << (n - 1 - q);
    }
    return m;
  }

  /// Bits of the basis index that pick up a sign.
  std::uint64_t z_mask() const {
    std::uint64_t m = 0;
    for (int q = 0; q < n; ++q) {
      const int d = digit(q);
      if (d == 2 || d == 3) m |= std::uint64_t{1} << (n - 1 - q);
    }
    return m;
  }

  int y_count() const {
    int c = 0;
    for (int q = 0; q < n; ++q) c += digit(q) == 2;
    return c;
  }

  static PauliString from_label(const std::string& label) {
    PauliString p{static_cast<int>(label.size()), 0};
    for (char ch : label) {
      int d = 0;
      switch (ch) {
        case 'I': case '_': d = 0; break;
        case 'X': d = 1; break;
        case 'Y': d = 2; break;
        case 'Z': d = 3; break;
        default: throw ValidationError(std::string("bad Pauli label character '") + ch + "'");
      }
      p.code = p.code * 4 + static_cast<std::uint64_t>(d);
    }
    return p;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

namespace detail {

/// Sparse action of a Pauli string: P|k> = phase(k) |k ^ x>.
struct PauliAction {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  cplx base{1.0, 0.0};

  explicit PauliAction(const PauliString& p) : x(p.x_mask()), z(p.z_mask()) {
    static const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    base = kIPow[p.y_count() % 4];
  }

  cplx phase(std::uint64_t k) const { return (std::popcount(k & z) & 1) ? -base : base; }
};

}  // namespace detail

inline CMat pauli_matrix(const PauliString& p) {
  const auto d = static_cast<Eigen::Index>(pow2(p.n));
  CMat m = CMat::Zero(d, d);
  const detail::PauliAction act(p);
  for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(d); ++k) {
    m(static_cast<Eigen::Index>(k ^ act.x), static_cast<Eigen::Index>(k)) = act.phase(k);
  }
  return m;
}

/// tr[P M] in O(d).
inline cplx pauli_trace(const PauliString& p, const CMat& m) {
  const detail::PauliAction act(p);
  cplx acc{0.0, 0.0};
  for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(m.rows()); ++k) {
    acc += act.phase(k) * m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k ^ act.x));
  }
  return acc;
}

/// P * M without forming P.
inline CMat pauli_left_multiply(const PauliString& p, const CMat& m) {
  const detail::PauliAction act(p);
  CMat out(m.rows(), m.cols());
  for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(m.rows()); ++k) {
    out.row(static_cast<Eigen::Index>(k ^ act.x)) = act.phase(k) * m.row(static_cast<Eigen::Index>(k));
  }
  return out;
}

/// Nontrivial n-qubit Pauli strings in ascending code order (codes 1 .. 4^n - 1).
inline std::vector<PauliString> pauli_basis(int n) {
  check_qubits(n);
  std::vector<PauliString> out;
  out.reserve(pow4(n) - 1);
  for (std::uint64_t c = 1; c < pow4(n); ++c) out.push_back({n, c});
  return out;
}

/// Real coordinates of a state in the traceless Pauli basis.
struct BlochVector {
  int n = 1;
  RVec theta;
};

/// Traceless observable x . P.
struct Observable {
  int n = 1;
  RVec coeffs;
};

using DensityMatrix = CMat;

inline int qubits_from_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw ValidationError("matrix dimension " + std::to_string(dim) + " is not a power of two");
  }
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  check_qubits(n);
  return n;
}

/// Unnormalized Pauli coordinates v_c = tr[P_c M] over all 4^n codes, identity first.
inline CVec pauli_coordinates(const CMat& m) {
  const int n = qubits_from_dim(m.rows());
  CVec v(static_cast<Eigen::Index>(pow4(n)));
  for (std::uint64_t c = 0; c < pow4(n); ++c) v(static_cast<Eigen::Index>(c)) = pauli_trace({n, c}, m);
  return v;
}

/// Inverse of pauli_coordinates: (1/d) sum_c v_c P_c.
inline CMat operator_from_pauli_coordinates(int n, const CVec& v) {
  const auto d = static_cast<Eigen::Index>(pow2(n));
  CMat m = CMat::Zero(d, d);
  for (std::uint64_t c = 0; c < pow4(n); ++c) {
    const cplx coeff = v(static_cast<Eigen::Index>(c));
    if (coeff == cplx{0.0, 0.0}) continue;
    const detail::PauliAction act({n, c});
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(d); ++k) {
      m(static_cast<Eigen::Index>(k ^ act.x), static_cast<Eigen::Index>(k)) += coeff * act.phase(k);
    }
  }
  return m / static_cast<double>(d);
}

inline void validate_density(const DensityMatrix& rho, double tol = 1e-10) {
  if (rho.rows() != rho.cols()) throw ValidationError("density matrix is not square");
  qubits_from_dim(rho.rows());
  if (!is_hermitian(rho, tol)) throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx{1.0, 0.0}) > tol) throw ValidationError("density matrix trace != 1");
}

inline BlochVector bloch_from_density(const DensityMatrix& rho) {
  validate_density(rho);
  const int n = qubits_from_dim(rho.rows());
  const double scale = std::pow(2.0, (1.0 - n) / 2.0);
  BlochVector b{n, RVec(static_cast<Eigen::Index>(pow4(n) - 1))};
  for (std::uint64_t c = 1; c < pow4(n); ++c) {
    b.theta(static_cast<Eigen::Index>(c - 1)) = scale * pauli_trace({n, c}, rho).real();
  }
  return b;
}

/// I/2^n + 2^((-1-n)/2) theta . P. Positivity is not checked; see is_physical.
inline DensityMatrix density_from_bloch(const BlochVector& b) {
  check_qubits(b.n);
  if (static_cast<std::uint64_t>(b.theta.size()) != pow4(b.n) - 1) {
    throw ValidationError("Bloch vector length " + std::to_string(b.theta.size()) +
                          " does not match 4^n - 1 for n = " + std::to_string(b.n));
  }
  const double d = static_cast<double>(pow2(b.n));
  CVec v(static_cast<Eigen::Index>(pow4(b.n)));
  v(0) = 1.0;
  // (1/d) v_c = 2^((-1-n)/2) theta_c  =>  v_c = 2^((n-1)/2) theta_c
  const double scale = d * std::pow(2.0, (-1.0 - b.n) / 2.0);
  for (Eigen::Index i = 0; i < b.theta.size(); ++i) v(i + 1) = scale * b.theta(i);
  return operator_from_pauli_coordinates(b.n, v);
}

inline bool is_physical(const DensityMatrix& rho, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

inline CMat observable_matrix(const Observable& obs) {
  check_qubits(obs.n);
  if (static_cast<std::uint64_t>(obs.coeffs.size()) != pow4(obs.n) - 1) {
    throw ValidationError("observable coefficient length does not match 4^n - 1");
  }
  CVec v = CVec::Zero(static_cast<Eigen::Index>(pow4(obs.n)));
  const double d = static_cast<double>(pow2(obs.n));
  for (Eigen::Index i = 0; i < obs.coeffs.size(); ++i) v(i + 1) = d * obs.coeffs(i);
  return operator_from_pauli_coordinates(obs.n, v);
}

/// <X> = 2^((n-1)/2) theta . x
inline double expectation(const BlochVector& b, const Observable& obs) {
  if (b.n != obs.n || b.theta.size() != obs.coeffs.size()) {
    throw ValidationError("Bloch vector and observable dimensions differ");
  }
  return std::pow(2.0, (b.n - 1) / 2.0) * b.theta.dot(obs.coeffs);
}

/// Observable equal to Z on one qubit.
inline Observable single_z(int n, int qubit = 0) {
  check_qubits(n);
  Observable o{n, RVec::Zero(static_cast<Eigen::Index>(pow4(n) - 1))};
  const std::uint64_t code = std::uint64_t{3} << (2 * (n - 1 - qubit));
  o.coeffs(static_cast<Eigen::Index>(code - 1)) = 1.0;
  return o;
}

/// |0...0><0...0|
inline DensityMatrix zero_state(int n) {
  check_qubits(n);
  const auto d = static_cast<Eigen::Index>(pow2(n));
  DensityMatrix rho = DensityMatrix::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

}  // namespace qemb

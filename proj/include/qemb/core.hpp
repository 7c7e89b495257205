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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qemb {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

/// Largest qubit count accepted by the dense routines.
inline constexpr int kMaxQubits = 6;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Qubit count or matrix dimension outside the supported range.
struct SizeError : Error {
  using Error::Error;
};

/// Input violates a structural precondition (Hermiticity, trace, length).
struct ValidationError : Error {
  using Error::Error;
};

/// A transfer map whose inverse does not exist (injectivity fails).
struct NonInvertibleError : Error {
  NonInvertibleError(const std::string& what, double sigma_min)
      : Error(what + " (smallest singular value " + std::to_string(sigma_min) + ")"),
        smallest_singular_value(sigma_min) {}
  double smallest_singular_value;
};

/// Quasiprobability decomposition has no solution over the given dictionary.
struct InfeasibleError : Error {
  using Error::Error;
};

inline std::uint64_t pow4(int n) { return std::uint64_t{1} << (2 * n); }
inline std::uint64_t pow2(int n) { return std::uint64_t{1} << n; }

inline void check_qubits(int n, int n_max = kMaxQubits) {
  if (n < 1 || n > n_max) {
    throw SizeError("qubit count " + std::to_string(n) + " outside [1, " +
                    std::to_string(n_max) + "]");
  }
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline RMat kron(const RMat& a, const RMat& b) {
  RMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline bool is_hermitian(const CMat& m, double tol = 1e-10) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const CMat& u, double tol = 1e-9) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qemb

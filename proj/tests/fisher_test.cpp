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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace qemb {
namespace {

BlochVector z_pole() { return {1, RVec::Unit(3, 2)}; }

TEST(QfiBloch, DepolarizedQubitClosedForm) {
  for (double p : {0.01, 0.1, 0.4}) {
    const double a2 = (1 - p) * (1 - p);
    const QfiMatrix j = qfi_bloch(single_qubit_noise(NoiseKind::LocalDepolarizing, p), z_pole());
    RMat expect = RMat::Zero(3, 3);
    expect.diagonal() << a2, a2, a2 / (1 - a2);
    EXPECT_LT((j.j - expect).cwiseAbs().maxCoeff(), 1e-10 * expect.maxCoeff()) << p;
    EXPECT_FALSE(j.divergent);
  }
}

TEST(QfiBloch, QubitFormulaOffAxis) {
  // J = A^T (I + a a^T / (1 - |a|^2)) A with a the output Bloch vector
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const TransferMap t = ptm_from_kraus(testing::random_cptp(1, rng));
    const BlochVector theta = bloch_from_density(testing::random_density(1, rng));
    const BlochVector out = t.apply(theta);
    const RMat a = t.A();
    const RVec v = out.theta;
    const RMat expect = a.transpose() * (RMat::Identity(3, 3) + v * v.transpose() / (1 - v.squaredNorm())) * a;
    EXPECT_LT((qfi_bloch(t, theta).j - expect).cwiseAbs().maxCoeff(), 1e-9 * expect.cwiseAbs().maxCoeff());
  }
}

TEST(QfiBloch, MaximallyMixedOutput) {
  // all eigenvalues 2^-n, so J = 2^(n-1) alpha^2 I
  for (int n = 1; n <= 3; ++n) {
    const double p = 0.1, alpha = 1 - p;
    const auto m = static_cast<Eigen::Index>(pow4(n) - 1);
    const QfiMatrix j = qfi_bloch(make_noise({NoiseKind::GlobalDepolarizing, p, n}), {n, RVec::Zero(m)});
    EXPECT_LT((j.j - std::pow(2.0, n - 1) * alpha * alpha * RMat::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-12) << n;
  }
}

TEST(QfiBloch, PureOutputIsFlaggedDivergent) {
  EXPECT_TRUE(qfi_bloch(TransferMap::identity(1), z_pole()).divergent);
  EXPECT_TRUE(qfi_bloch(TransferMap::identity(2), bloch_from_density(zero_state(2))).divergent);
  EXPECT_FALSE(qfi_bloch(make_noise({NoiseKind::GlobalDepolarizing, 0.01, 2}), bloch_from_density(zero_state(2))).divergent);
}

TEST(QfiBloch, SymmetricAndPositive) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const TransferMap t = ptm_from_kraus(testing::random_cptp(n, rng, 4));
      const QfiMatrix j = qfi_bloch(t, bloch_from_density(testing::random_density(n, rng)));
      EXPECT_LT((j.j - j.j.transpose()).cwiseAbs().maxCoeff(), 1e-10);
      Eigen::SelfAdjointEigenSolver<RMat> es(j.j, Eigen::EigenvaluesOnly);
      EXPECT_GT(es.eigenvalues()(0), 0.0);
    }
  }
}

TEST(QfiBloch, MatchesBuresFiniteDifference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const TransferMap t = ptm_from_kraus(testing::random_cptp(1, rng));
    const BlochVector theta = bloch_from_density(testing::random_density(1, rng));
    const RMat exact = qfi_bloch(t, theta).j;
    const RMat fd = qfi_finite_difference(t, theta, 1e-4);
    EXPECT_LT((exact - fd).cwiseAbs().maxCoeff(), 1e-4 * std::max(1.0, exact.cwiseAbs().maxCoeff())) << trial;
  }
}

TEST(QfiBloch, DataProcessingInequality) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 2;
    const auto m = static_cast<Eigen::Index>(pow4(n) - 1);
    const TransferMap first = ptm_from_kraus(testing::random_cptp(n, rng, 2));
    const TransferMap second = ptm_from_kraus(testing::random_cptp(n, rng, 2));
    const BlochVector theta = bloch_from_density(testing::random_density(n, rng));
    RVec v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = normal(rng);
    const double before = v.dot(qfi_bloch(first, theta).j * v);
    const double after = v.dot(qfi_bloch(compose(second, first), theta).j * v);
    EXPECT_LE(after, before + 1e-8 * std::max(1.0, before)) << trial;
  }
}

TEST(CrBound, Examples) {
  const double p = 0.1, a2 = (1 - p) * (1 - p);
  const QfiMatrix j = qfi_bloch(single_qubit_noise(NoiseKind::LocalDepolarizing, p), z_pole());
  EXPECT_NEAR(cr_bound(j, single_z(1), 1), (1 - a2) / a2, 1e-10);
  EXPECT_NEAR(cr_bound(j, single_z(1), 2), cr_bound(j, single_z(1), 1) / 2, 1e-14);
  EXPECT_THROW(cr_bound(j, single_z(2), 1), ValidationError);
}

TEST(CrBound, NoiselessNearPureStateGivesVariance) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 2; ++n) {
    const auto d = static_cast<Eigen::Index>(pow2(n));
    const CVec psi = testing::random_pure(n, rng);
    const CMat pure = psi * psi.adjoint();
    const double delta = 1e-7;
    const CMat rho = (1 - delta) * pure + delta * CMat::Identity(d, d) / static_cast<double>(d);
    const Observable x = testing::random_observable(n, rng);
    const double bound = cr_bound(qfi_bloch(TransferMap::identity(n), bloch_from_density(rho)), x, 3);
    EXPECT_NEAR(bound, variance(pure, observable_matrix(x)) / 3, 1e-5 * std::max(1.0, bound));
  }
}

TEST(CrBound, SingularMatrixReportsDirection) {
  QfiMatrix j{1, RMat::Identity(3, 3), false};
  j.j(1, 1) = 0.0;
  try {
    cr_bound(j, single_z(1));
    FAIL() << "expected SingularQfiError";
  } catch (const SingularQfiError& e) {
    EXPECT_NEAR(std::abs(e.null_direction(1)), 1.0, 1e-12);
  }
}

TEST(OptimalObservable, Examples) {
  std::mt19937_64 rng(6);
  const Observable x = testing::random_observable(2, rng);
  const OffsetObservable id = optimal_observable(TransferMap::identity(2), x);
  EXPECT_LT((id.obs.coeffs - x.coeffs).norm(), 1e-14);
  EXPECT_EQ(id.offset, 0.0);

  const double p = 0.05;
  const OffsetObservable g = optimal_observable(make_noise({NoiseKind::GlobalDepolarizing, p, 2}), x);
  EXPECT_LT((g.obs.coeffs - x.coeffs / (1 - p)).norm(), 1e-13);
  EXPECT_NEAR(g.offset, 0.0, 1e-15);

  const double q = 0.2;
  const OffsetObservable a = optimal_observable(single_qubit_noise(NoiseKind::AmplitudeDamping, q), single_z(1));
  EXPECT_LT((a.obs.coeffs - RVec::Unit(3, 2) / (1 - q)).norm(), 1e-14);
  EXPECT_NEAR(a.offset, -q / (1 - q), 1e-14);
  CMat expect = pauli_matrix({1, 3}) / (1 - q);
  expect.diagonal().array() -= q / (1 - q);
  EXPECT_LT((a.matrix() - expect).norm(), 1e-14);
}

TEST(OptimalObservable, AbsorbsTheNoise) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 2; ++n) {
    const TransferMap t = ptm_from_kraus(testing::random_cptp(n, rng));
    const Observable x = testing::random_observable(n, rng);
    const CMat y = optimal_observable(t, x).matrix();
    const CMat xm = observable_matrix(x);
    for (int trial = 0; trial < 10; ++trial) {
      const CMat rho = testing::random_density(n, rng, 1 + trial % 2);
      EXPECT_NEAR((rho * xm).trace().real(), (t.apply(rho) * y).trace().real(), 1e-9);
    }
  }
}

TEST(OptimalObservable, SaturatesCramerRao) {
  std::mt19937_64 rng(8);
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const TransferMap t = ptm_from_kraus(testing::random_cptp(n, rng, 3));
      const Observable x = testing::random_observable(n, rng);
      const CMat rho = testing::random_density(n, rng);
      const double var = variance(t.apply(rho), optimal_observable(t, x).matrix());
      const double bound = cr_bound(qfi_bloch(t, bloch_from_density(rho)), x, 1);
      EXPECT_NEAR(var, bound, 1e-9 * std::max(1.0, bound));
    }
  }
}

TEST(OptimalObservable, SingularNoiseRejected) {
  TransferMap dephase{1, RMat::Zero(4, 4)};
  dephase.full(0, 0) = 1;
  dephase.full(3, 3) = 1;
  EXPECT_THROW(optimal_observable(dephase, single_z(1)), NonInvertibleError);
}

TEST(LemmaBound, Examples) {
  const double p = 0.1, gamma = 1 / (1 - p);
  for (int n = 1; n <= 3; ++n) {
    const double expect = std::pow(2.0, n - 1) / p * (1 - p) * (1 - p);
    EXPECT_NEAR(*lemma_bound(n, 1, 1, p, gamma, false), expect, 1e-12 * expect);
    EXPECT_NEAR(*lemma_bound(n, 1, 1, p, gamma, true), expect, 1e-12 * expect);
  }
  EXPECT_NEAR(*lemma_bound(2, 4, 7, p, gamma, false), 7 * *lemma_bound(2, 4, 1, p, gamma, false), 1e-10);
  const double b5 = *lemma_bound(1, 5, 1, p, gamma, true);
  EXPECT_NEAR(b5, std::pow(0.9, 10) / (1 - std::pow(0.9, 5)), 1e-12);
  EXPECT_FALSE(lemma_bound(1, 5, 1, 0.0, gamma, true).has_value());
}

TEST(LemmaBound, DominatesDepthFiveDepolarizingCircuit) {
  const double p = 0.1;
  const double b5 = *lemma_bound(1, 5, 1, p, 1 / (1 - p), true);
  std::mt19937_64 rng(9);
  const LayeredCircuit c = random_circuit(1, 5, Ensemble::Haar, single_qubit_noise(NoiseKind::LocalDepolarizing, p), rng);
  const TransferMap eff = compile_effective(c).map;
  for (int trial = 0; trial < 20; ++trial) {
    const CVec psi = testing::random_pure(1, rng);
    const BlochVector theta = bloch_from_density(CMat(psi * psi.adjoint()));
    EXPECT_LE(qfi_bloch(eff, theta).max_eigenvalue(), b5 + 1e-8);
  }
}

TEST(LemmaBound, SingleLayerRandomChannels) {
  std::mt19937_64 rng(10);
  int checked = 0;
  // beta <= 1e-3 is common for random channels; draw until 40 qualify.
  for (int trial = 0; checked < 40 && trial < 1000; ++trial) {
    const int n = 1 + trial % 2;
    const TransferMap t = ptm_from_kraus(testing::random_cptp(n, rng, 2 + trial % 4));
    const BetaResult beta = beta_margin(t, 16, static_cast<std::uint64_t>(trial));
    if (beta.value <= 1e-3) continue;
    ++checked;
    const double bound = *lemma_bound(n, 1, 1, beta.value, noise_strength(t), false);
    for (int s = 0; s < 5; ++s) {
      const CVec psi = testing::random_pure(n, rng);
      const BlochVector theta = bloch_from_density(CMat(psi * psi.adjoint()));
      EXPECT_LE(qfi_bloch(t, theta).max_eigenvalue(), bound * (1 + 1e-9) + 1e-8) << trial;
    }
  }
  EXPECT_EQ(checked, 40);
}

TEST(Fidelity, Basics) {
  std::mt19937_64 rng(11);
  const CMat rho = testing::random_density(2, rng);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-12);
  const CVec a = testing::random_pure(1, rng), b = testing::random_pure(1, rng);
  EXPECT_NEAR(fidelity(a * a.adjoint(), b * b.adjoint()), std::norm(a.dot(b)), 1e-10);
}

}  // namespace
}  // namespace qemb

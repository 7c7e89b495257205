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

#include <sstream>

#include <qemb/io.hpp>

#include "test_util.hpp"

namespace qemb {
namespace {

constexpr NoiseKind kAllKinds[] = {NoiseKind::GlobalDepolarizing, NoiseKind::LocalDepolarizing,
                                   NoiseKind::LocalDephasing, NoiseKind::AmplitudeDamping};

double max_abs(const RMat& m) { return m.cwiseAbs().maxCoeff(); }

TEST(PtmFromKraus, Identity) {
  for (int n = 1; n <= 2; ++n) {
    const auto d = static_cast<Eigen::Index>(pow2(n));
    const TransferMap t = ptm_from_kraus(KrausChannel(n, {CMat::Identity(d, d)}));
    EXPECT_LT(max_abs(t.full - TransferMap::identity(n).full), 1e-15);
  }
}

TEST(PtmFromKraus, GlobalDepolarizing) {
  const NoiseModel m{NoiseKind::GlobalDepolarizing, 0.03, 2};
  const TransferMap t = ptm_from_kraus(noise_kraus(m));
  EXPECT_LT(max_abs(t.A() - 0.97 * RMat::Identity(15, 15)), 1e-14);
  EXPECT_LT(t.c().norm(), 1e-15);
  EXPECT_LT(max_abs(t.full - make_noise(m).full), 1e-14);
}

TEST(PtmFromKraus, AmplitudeDampingSingleQubit) {
  const double p = 0.2;
  const TransferMap t = ptm_from_kraus(noise_kraus({NoiseKind::AmplitudeDamping, p, 1}));
  RMat a = RMat::Zero(3, 3);
  a.diagonal() << std::sqrt(1 - p), std::sqrt(1 - p), 1 - p;
  EXPECT_LT(max_abs(t.A() - a), 1e-15);
  EXPECT_LT((t.c() - p * RVec::Unit(3, 2)).norm(), 1e-15);
  EXPECT_TRUE(t.is_trace_preserving());
  EXPECT_FALSE(t.is_unital());
}

TEST(PtmFromKraus, TranslationNormalization) {
  // c_i = 2^((1-3n)/2) tr[P_i E(I)]
  std::mt19937_64 rng(4);
  const int n = 2;
  const KrausChannel ch = testing::random_cptp(n, rng);
  const TransferMap t = ptm_from_kraus(ch);
  const CMat e_id = ch.apply(CMat::Identity(4, 4));
  for (std::uint64_t i = 1; i < pow4(n); ++i) {
    const double ci = std::pow(2.0, (1.0 - 3 * n) / 2.0) * pauli_trace({n, i}, e_id).real();
    EXPECT_NEAR(t.c()(static_cast<Eigen::Index>(i - 1)), ci, 1e-14);
  }
}

TEST(PtmFromKraus, ModelsMatchKrausForms) {
  for (NoiseKind kind : kAllKinds) {
    for (int n = 1; n <= 3; ++n) {
      const NoiseModel m{kind, 0.07, n};
      EXPECT_LT(max_abs(ptm_from_kraus(noise_kraus(m)).full - make_noise(m).full), 1e-13) << to_string(kind) << n;
    }
  }
}

TEST(KrausFromPtm, IdentityGivesSingleOperator) {
  const KrausChannel k = kraus_from_ptm(TransferMap::identity(1));
  ASSERT_EQ(k.kraus.size(), 1u);
  EXPECT_EQ(k.weights[0], 1.0);
  EXPECT_LT((k.kraus[0] - CMat::Identity(2, 2)).norm(), 1e-14);
  EXPECT_TRUE(k.cptp);
}

TEST(KrausFromPtm, GlobalDepolarizingPauliOperators) {
  const int n = 2;
  const TransferMap t = make_noise({NoiseKind::GlobalDepolarizing, 0.1, n});
  const KrausChannel k = kraus_from_ptm(t);
  EXPECT_EQ(k.kraus.size(), pow4(n));
  EXPECT_TRUE(k.all_weights_positive());
  double total = 0.0;
  for (const auto& op : k.kraus) total += op.squaredNorm() / static_cast<double>(pow2(n));
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_LT(max_abs(ptm_from_kraus(k).full - t.full), 1e-12);
}

TEST(KrausFromPtm, InverseDepolarizingHasNegativeWeights) {
  const double p = 0.1;
  const TransferMap inv = inverse_channel(single_qubit_noise(NoiseKind::LocalDepolarizing, p));
  const KrausChannel k = kraus_from_ptm(inv);
  EXPECT_FALSE(k.cptp);
  int negatives = 0;
  for (double w : k.weights) negatives += w < 0;
  EXPECT_EQ(negatives, 3);
  EXPECT_LT(max_abs(ptm_from_kraus(k).full - inv.full), 1e-12);
  // Choi eigenvalues are 2 q_b with q = {(4-p)/(4-4p), -p/(4-4p) x3}.
  std::vector<double> q;
  for (std::size_t i = 0; i < k.kraus.size(); ++i) q.push_back(k.weights[i] * k.kraus[i].squaredNorm() / 2.0);
  std::sort(q.begin(), q.end());
  EXPECT_NEAR(q[3], (4 - p) / (4 - 4 * p), 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(q[static_cast<std::size_t>(i)], -p / (4 - 4 * p), 1e-12);
}

TEST(KrausRoundTrip, RandomChannels) {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const KrausChannel ch = testing::random_cptp(n, rng, 1 + trial % 4);
      const TransferMap t1 = ptm_from_kraus(ch);
      const KrausChannel k2 = kraus_from_ptm(t1);
      const TransferMap t2 = ptm_from_kraus(k2);
      ASSERT_LT(max_abs(t2.full - t1.full), 1e-9);
      EXPECT_TRUE(k2.cptp);
      const TransferMap t3 = ptm_from_kraus(kraus_from_ptm(t2));
      ASSERT_LT(max_abs(t3.full - t2.full), 1e-9);
      EXPECT_LT((choi_from_kraus(ch) - choi_from_ptm(t1)).norm(), 1e-12);
    }
  }
}

TEST(Compose, IdentityAndOrder) {
  std::mt19937_64 rng(8);
  const TransferMap a = ptm_from_kraus(testing::random_cptp(1, rng));
  const TransferMap b = ptm_from_kraus(testing::random_cptp(1, rng));
  EXPECT_LT(max_abs(compose(a, TransferMap::identity(1)).full - a.full), 1e-15);
  const CMat rho = testing::random_density(1, rng);
  EXPECT_LT((compose(a, b).apply(rho) - a.apply(b.apply(rho))).norm(), 1e-13);
  EXPECT_THROW(compose(a, TransferMap::identity(2)), ValidationError);
}

TEST(Compose, DepolarizingRatesMultiply) {
  const TransferMap a = single_qubit_noise(NoiseKind::LocalDepolarizing, 0.1);
  const TransferMap b = single_qubit_noise(NoiseKind::LocalDepolarizing, 0.2);
  const TransferMap ab = compose(a, b);
  const double p = 1 - 0.9 * 0.8;
  EXPECT_LT(max_abs(ab.A() - (1 - p) * RMat::Identity(3, 3)), 1e-15);
}

TEST(Tensor, LocalDepolarizing) {
  const TransferMap one = single_qubit_noise(NoiseKind::LocalDepolarizing, 0.05);
  const TransferMap two = tensor(one, one);
  EXPECT_LT(max_abs(two.full - make_noise({NoiseKind::LocalDepolarizing, 0.05, 2}).full), 1e-15);
  // index order follows the basis: IX has weight one, XX weight two
  EXPECT_NEAR(two.full(1, 1), 0.95, 1e-15);
  EXPECT_NEAR(two.full(5, 5), 0.95 * 0.95, 1e-15);
  std::mt19937_64 rng(2);
  const KrausChannel ka = testing::random_cptp(1, rng), kb = testing::random_cptp(1, rng);
  EXPECT_LT(max_abs(tensor(ptm_from_kraus(ka), ptm_from_kraus(kb)).full - ptm_from_kraus(tensor(ka, kb)).full), 1e-13);
}

TEST(Inverse, IdentityAndComposition) {
  EXPECT_LT(max_abs(inverse_channel(TransferMap::identity(2)).full - RMat::Identity(16, 16)), 1e-15);
  for (NoiseKind kind : kAllKinds) {
    for (double p : {0.001, 0.01, 0.1}) {
      const TransferMap t = make_noise({kind, p, 2});
      const TransferMap inv = inverse_channel(t);
      EXPECT_LT(max_abs(compose(inv, t).full - RMat::Identity(16, 16)), 1e-9);
      EXPECT_LT(max_abs(compose(t, inv).full - RMat::Identity(16, 16)), 1e-9);
      EXPECT_TRUE(inv.is_trace_preserving(1e-12));
    }
  }
}

TEST(Inverse, AmplitudeDampingClosedForm) {
  const double p = 0.1;
  const TransferMap inv = inverse_channel(single_qubit_noise(NoiseKind::AmplitudeDamping, p));
  RMat expect = RMat::Zero(4, 4);
  expect.diagonal() << 1.0, 1 / std::sqrt(1 - p), 1 / std::sqrt(1 - p), 1 / (1 - p);
  expect(3, 0) = -p / (1 - p);
  EXPECT_LT(max_abs(inv.full - expect), 1e-14);
  // Signed Kraus pair E1' = diag(1, (1-p)^-1/2), E2' = sqrt(p/(1-p)) |0><1| with weight -1.
  CMat e1 = CMat::Zero(2, 2), e2 = CMat::Zero(2, 2);
  e1(0, 0) = 1.0;
  e1(1, 1) = 1 / std::sqrt(1 - p);
  e2(0, 1) = std::sqrt(p / (1 - p));
  const KrausChannel signed_pair(1, {e1, e2}, {1.0, -1.0}, false);
  EXPECT_LT(max_abs(ptm_from_kraus(signed_pair).full - inv.full), 1e-14);
}

TEST(Inverse, SingularMapReportsSigma) {
  TransferMap full_dephase{1, RMat::Zero(4, 4)};
  full_dephase.full(0, 0) = 1.0;
  full_dephase.full(3, 3) = 1.0;
  try {
    inverse_channel(full_dephase);
    FAIL() << "expected NonInvertibleError";
  } catch (const NonInvertibleError& e) {
    EXPECT_NEAR(e.smallest_singular_value, 0.0, 1e-15);
  }
}

TEST(NoiseStrength, Examples) {
  EXPECT_NEAR(noise_strength(make_noise({NoiseKind::GlobalDepolarizing, 0.01, 2})), 1 / 0.99, 1e-13);
  std::mt19937_64 rng(9);
  EXPECT_NEAR(noise_strength(ptm_from_unitary(haar_unitary(4, rng))), 1.0, 1e-12);
  EXPECT_NEAR(noise_strength(TransferMap::identity(1)), 1.0, 1e-15);
  EXPECT_NEAR(noise_strength(make_noise({NoiseKind::AmplitudeDamping, 0.01, 1})), 1 / std::sqrt(0.99), 1e-13);
  EXPECT_NEAR(noise_strength(make_noise({NoiseKind::AmplitudeDamping, 0.01, 1})), 1.00504, 1e-5);
}

TEST(NoiseStrength, UnitalWithMarginShrinks) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 2;
    const TransferMap t = testing::random_unital(n, rng, 3 + trial % 3);
    const BetaResult b = beta_margin(t, 8, 100 + static_cast<std::uint64_t>(trial));
    if (!b.condition_ii) continue;
    ++checked;
    EXPECT_GT(noise_strength(t), 1.0 + 1e-12);
  }
  EXPECT_GT(checked, 20);
}

TEST(Beta, Examples) {
  const BetaResult g = beta_margin(make_noise({NoiseKind::GlobalDepolarizing, 0.01, 2}));
  EXPECT_NEAR(g.value, 0.01, 1e-6);
  EXPECT_TRUE(g.condition_ii);
  EXPECT_EQ(model_beta({NoiseKind::GlobalDepolarizing, 0.01, 2}), 0.01);
  const BetaResult id = beta_margin(TransferMap::identity(1));
  EXPECT_FALSE(id.condition_ii);
  EXPECT_NEAR(id.value, 0.0, 1e-12);
  for (double p : {0.01, 0.1, 0.5}) {
    const BetaResult ad = beta_margin(make_noise({NoiseKind::AmplitudeDamping, p, 1}));
    EXPECT_FALSE(ad.condition_ii) << p;
    // the rank-deficient output comes from |0>
    EXPECT_NEAR(std::norm(ad.state(0)), 1.0, 1e-6);
  }
  EXPECT_FALSE(beta_margin(make_noise({NoiseKind::LocalDephasing, 0.1, 1})).condition_ii);
}

TEST(Beta, GlobalDepolarizingNumericMatchesAnalytic) {
  for (int n = 1; n <= 3; ++n) {
    for (double p : {0.001, 0.05, 0.3}) {
      EXPECT_NEAR(beta_margin(make_noise({NoiseKind::GlobalDepolarizing, p, n})).value, p, 1e-6);
    }
  }
}

TEST(Beta, LocalDepolarizingProductWorstCase) {
  // Product inputs give d * (p/2)^n = p^n; the minimizer finds nothing lower.
  for (int n = 1; n <= 2; ++n) {
    const double p = 0.1;
    const BetaResult b = beta_margin(make_noise({NoiseKind::LocalDepolarizing, p, n}));
    EXPECT_NEAR(b.value, std::pow(p, n), 1e-8);
  }
}

TEST(Beta, OutputMarginHoldsOnRandomStates) {
  std::mt19937_64 rng(13);
  const TransferMap t = testing::random_unital(2, rng, 4);
  const BetaResult b = beta_margin(t);
  for (int i = 0; i < 200; ++i) {
    const CVec psi = testing::random_pure(2, rng);
    const CMat out = t.apply(CMat(psi * psi.adjoint()));
    Eigen::SelfAdjointEigenSolver<CMat> es(out, Eigen::EigenvaluesOnly);
    EXPECT_GE(4.0 * es.eigenvalues()(0), b.value - 1e-9);
  }
}

TEST(Nu, Examples) {
  EXPECT_NEAR(nu(TransferMap::identity(2)), 1.0, 1e-15);
  for (double p : {0.001, 0.01, 0.1}) {
    const TransferMap inv = inverse_channel(single_qubit_noise(NoiseKind::LocalDepolarizing, p));
    const double closed = (4 - 2 * p + p * p) / (4 * (1 - p) * (1 - p));
    EXPECT_NEAR(nu(inv), closed, 1e-12);
    EXPECT_NEAR(nu_choi(inv), closed, 1e-12);
    const double paulis = std::pow((4 - p) / (4 - 4 * p), 2) + 3 * std::pow(p / (4 - 4 * p), 2);
    EXPECT_NEAR(paulis, closed, 1e-14);
  }
  const double p = 1e-4;
  const double nd = nu(inverse_channel(single_qubit_noise(NoiseKind::LocalDephasing, p)));
  EXPECT_NEAR(nd, (4 - 4 * p + 2 * p * p) / (4 * (1 - p) * (1 - p)), 1e-14);
  EXPECT_LT(std::abs(nd - (1 + p)) / nd, 1e-4);
}

TEST(Nu, RouteEquivalence) {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const TransferMap inv = inverse_channel(ptm_from_kraus(testing::random_cptp(n, rng)));
      EXPECT_NEAR(nu(inv), nu_choi(inv), 1e-12 * nu(inv));
    }
  }
}

TEST(Eta, Examples) {
  EXPECT_NEAR(eta(inverse_channel(single_qubit_noise(NoiseKind::LocalDepolarizing, 0.2))), 0.5, 1e-15);
  const double p = 0.1;
  const TransferMap inv = inverse_channel(single_qubit_noise(NoiseKind::AmplitudeDamping, p));
  // E^-1(I) = diag((1-2p)/(1-p), 1/(1-p))
  const double e0 = (1 - 2 * p) / (1 - p), e1 = 1 / (1 - p);
  EXPECT_NEAR(eta(inv), (e0 * e0 + e1 * e1) / 4, 1e-14);
  const CMat image = inv.apply(CMat::Identity(2, 2));
  EXPECT_NEAR(eta(inv), (image * image).trace().real() / 4, 1e-14);
  const double small = eta(inverse_channel(single_qubit_noise(NoiseKind::AmplitudeDamping, 1e-4)));
  EXPECT_NEAR(small, 0.5, 1e-6);
}

TEST(NuEta, Multiplicative) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const TransferMap a = inverse_channel(ptm_from_kraus(testing::random_cptp(1, rng)));
    const TransferMap b = inverse_channel(ptm_from_kraus(testing::random_cptp(1 + trial % 2, rng)));
    const TransferMap ab = tensor(a, b);
    EXPECT_NEAR(nu(ab), nu(a) * nu(b), 1e-10 * nu(ab));
    EXPECT_NEAR(eta(ab), eta(a) * eta(b), 1e-10 * eta(ab));
  }
}

TEST(MakeNoise, Examples) {
  const TransferMap g = make_noise({NoiseKind::GlobalDepolarizing, 0.01, 2});
  EXPECT_LT(max_abs(g.A() - 0.99 * RMat::Identity(15, 15)), 1e-15);
  EXPECT_TRUE(g.is_unital());
  const double p = 0.3;
  const TransferMap dph = make_noise({NoiseKind::LocalDephasing, p, 1});
  RMat a = RMat::Zero(3, 3);
  a.diagonal() << 1 - p, 1 - p, 1;
  EXPECT_LT(max_abs(dph.A() - a), 1e-15);
  EXPECT_TRUE(dph.is_unital());
  const TransferMap ad = make_noise({NoiseKind::AmplitudeDamping, p, 2});
  const RVec col = ad.translation_column();
  int nonzero = 0;
  for (Eigen::Index i = 0; i < col.size(); ++i) nonzero += std::abs(col(i)) > 0;
  EXPECT_EQ(nonzero, 3);
  EXPECT_NEAR(col(PauliString::from_label("IZ").code - 1), p, 1e-15);
  EXPECT_NEAR(col(PauliString::from_label("ZI").code - 1), p, 1e-15);
  EXPECT_NEAR(col(PauliString::from_label("ZZ").code - 1), p * p, 1e-15);
}

TEST(MakeNoise, RejectsBadRates) {
  EXPECT_THROW(make_noise({NoiseKind::LocalDepolarizing, 1.0, 1}), ValidationError);
  EXPECT_THROW(make_noise({NoiseKind::LocalDepolarizing, -0.1, 1}), ValidationError);
  EXPECT_THROW(make_noise({NoiseKind::LocalDepolarizing, 0.1, 0}), SizeError);
  EXPECT_THROW(noise_kind_from_string("bitflip"), ValidationError);
}

TEST(MakeNoise, AllModelsAreCptp) {
  for (NoiseKind kind : kAllKinds) {
    for (int n = 1; n <= 3; ++n) {
      for (double p : {0.0, 0.01, 0.5}) {
        const NoiseModel m{kind, p, n};
        const KrausChannel k = noise_kraus(m);
        const auto d = static_cast<Eigen::Index>(pow2(n));
        EXPECT_LT((k.completeness() - CMat::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);
        Eigen::SelfAdjointEigenSolver<CMat> es(choi_from_ptm(make_noise(m)), Eigen::EigenvaluesOnly);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
        EXPECT_TRUE(make_noise(m).is_trace_preserving());
      }
    }
  }
  EXPECT_THROW(noise_kraus({NoiseKind::LocalDepolarizing, 0.1, 5}), SizeError);
}

TEST(Serialization, NoiseModelJson) {
  const NoiseModel m{NoiseKind::AmplitudeDamping, 0.125, 3};
  const auto j = to_json(m);
  EXPECT_EQ(j.dump(), R"({"kind":"amp-damping","n":3,"p":0.125})");
  const NoiseModel back = noise_model_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.kind, m.kind);
  EXPECT_EQ(back.n, m.n);
  EXPECT_EQ(back.p, m.p);
  EXPECT_THROW(noise_model_from_json(nlohmann::json::parse(R"({"kind":"dephasing","n":1,"p":2})")), ValidationError);
}

TEST(Serialization, PtmCsvRoundTripIsExact) {
  std::mt19937_64 rng(23);
  const TransferMap t = ptm_from_kraus(testing::random_cptp(2, rng));
  std::stringstream ss;
  write_ptm_csv(ss, t);
  const TransferMap back = read_ptm_csv(ss);
  EXPECT_EQ(back.n, 2);
  EXPECT_EQ((back.full - t.full).cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace qemb

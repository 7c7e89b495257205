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

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qemb/bounds.hpp"
#include "qemb/circuit.hpp"
#include "qemb/lp.hpp"
#include "qemb/optimize.hpp"
#include "qemb/parallel.hpp"

namespace qemb {

// ---------------------------------------------------------------------------
// Shot sampling
// ---------------------------------------------------------------------------

/// Projective measurement of an observable on a fixed state.
class ShotSampler {
 public:
  ShotSampler(const DensityMatrix& state, const CMat& observable, std::uint64_t seed) : rng_(seed) {
    if (!is_hermitian(observable, 1e-9)) throw ValidationError("observable is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (observable + observable.adjoint()));
    values_ = es.eigenvalues();
    const CMat& v = es.eigenvectors();
    std::vector<double> probs(static_cast<std::size_t>(values_.size()));
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
      probs[static_cast<std::size_t>(k)] = std::max(0.0, (v.col(k).adjoint() * state * v.col(k))(0, 0).real());
    }
    double total = 0.0;
    for (double p : probs) total += p;
    if (std::abs(total - 1.0) > 1e-8) throw ValidationError("Born probabilities do not sum to 1");
    probs_ = probs;
    dist_ = std::discrete_distribution<int>(probs.begin(), probs.end());
  }

  double sample() { return values_(dist_(rng_)); }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  std::mt19937_64 rng_;
  RVec values_;
  std::vector<double> probs_;
  std::discrete_distribution<int> dist_;
};

// ---------------------------------------------------------------------------
// Rescaling
// ---------------------------------------------------------------------------

struct MitigationResult {
  double estimate = 0.0;         // sample mean of the mitigated single-shot estimator
  double bias = 0.0;             // exact: factor <X>_noisy - <X>_ideal
  double empirical_cost = 0.0;   // sample variance of the estimator / eps^2
  double analytic_cost = 0.0;    // factor^2 Var_noisy[X] / eps^2
  double std_error = 0.0;        // standard error of `estimate`
  double ideal = 0.0;
  double noisy_mean = 0.0;
  std::size_t shots = 0;
};

/// (1-p)^(-k_mean L)
inline double rescaling_log_factor(const NoiseModel& model, std::size_t depth) {
  return -k_mean_theory(model) * static_cast<double>(depth) * std::log1p(-model.p);
}

inline MitigationResult rescaling_estimate(const LayeredCircuit& circ, const Observable& obs, const NoiseModel& model,
                                           double eps, std::size_t shots, std::uint64_t seed) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  const double log_f = rescaling_log_factor(model, circ.depth());
  const CMat x = observable_matrix(obs);
  const EffectiveChannel eff = compile_effective(circ);
  const DensityMatrix ideal = ideal_output(circ);
  const DensityMatrix noisy = eff.map.apply(ideal);
  MitigationResult r;
  r.ideal = (ideal * x).trace().real();
  r.noisy_mean = (noisy * x).trace().real();
  const double var = std::max(0.0, (noisy * x * x).trace().real() - r.noisy_mean * r.noisy_mean);
  const double log_cost = 2.0 * log_f + std::log(var) - 2.0 * std::log(eps);
  if (log_cost > std::log(1e300)) throw Error("rescaling cost overflows (> 1e300)");
  const double f = std::exp(log_f);
  r.bias = f * r.noisy_mean - r.ideal;
  r.analytic_cost = f * f * var / (eps * eps);
  r.shots = shots;
  if (shots > 0) {
    ShotSampler sampler(noisy, x, seed);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t s = 0; s < shots; ++s) {
      const double v = f * sampler.sample();
      const double delta = v - mean;
      mean += delta / static_cast<double>(s + 1);
      m2 += delta * (v - mean);
    }
    r.estimate = mean;
    const double sample_var = shots > 1 ? m2 / static_cast<double>(shots - 1) : 0.0;
    r.empirical_cost = sample_var / (eps * eps);
    r.std_error = std::sqrt(sample_var / static_cast<double>(shots));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Probabilistic error cancellation
// ---------------------------------------------------------------------------

namespace detail {

inline int paulis_anticommute(const PauliString& a, const PauliString& b) {
  return (std::popcount(a.x_mask() & b.z_mask()) + std::popcount(a.z_mask() & b.x_mask())) & 1;
}

}  // namespace detail

/// PTM of rho -> P rho P.
inline TransferMap pauli_conjugation(const PauliString& p) {
  TransferMap t = TransferMap::identity(p.n);
  for (std::uint64_t i = 0; i < pow4(p.n); ++i) {
    if (detail::paulis_anticommute(p, {p.n, i})) t.full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -1.0;
  }
  return t;
}

/// Single-qubit reset rho -> tr[rho] |b><b|.
inline TransferMap reset_channel(int bit) {
  TransferMap t{1, RMat::Zero(4, 4)};
  t.full(0, 0) = 1.0;
  t.full(3, 0) = bit == 0 ? 1.0 : -1.0;
  return t;
}

inline std::vector<TransferMap> pauli_dictionary(int n) {
  std::vector<TransferMap> out;
  for (std::uint64_t c = 0; c < pow4(n); ++c) out.push_back(pauli_conjugation({n, c}));
  return out;
}

/// Single-qubit dictionary for a local model: Pauli conjugations, plus resets for amplitude damping.
inline std::vector<TransferMap> default_dictionary(NoiseKind kind) {
  auto dict = pauli_dictionary(1);
  if (kind == NoiseKind::AmplitudeDamping) {
    dict.push_back(reset_channel(0));
    dict.push_back(reset_channel(1));
  }
  return dict;
}

struct QuasiProbability {
  RVec q;
  double gamma = 1.0;  // sum |q|
};

/// min sum |q_b| with sum_b q_b B_b = target, as a linear program over PTM entries.
inline QuasiProbability quasiprobability_lp(const TransferMap& target, const std::vector<TransferMap>& dictionary) {
  if (dictionary.empty()) throw InfeasibleError("empty dictionary");
  const Eigen::Index dim = target.full.size();
  RMat cols(dim, static_cast<Eigen::Index>(dictionary.size()));
  for (std::size_t b = 0; b < dictionary.size(); ++b) {
    if (dictionary[b].n != target.n) throw ValidationError("dictionary qubit count mismatch");
    cols.col(static_cast<Eigen::Index>(b)) = dictionary[b].full.reshaped();
  }
  const RVec rhs = target.full.reshaped();
  const LpResult lp = solve_l1_decomposition(cols, rhs);
  if (lp.status != LpStatus::Optimal) throw InfeasibleError("dictionary does not span the inverse channel");
  if ((cols * lp.x - rhs).cwiseAbs().maxCoeff() > 1e-8) throw InfeasibleError("decomposition residual too large");
  return {lp.x, lp.objective};
}

/**
 * Exact quasiprobabilities over Pauli conjugations for the inverse of a Pauli
 * channel with PTM eigenvalues lambda_a: q_b = 4^-n sum_a (-1)^<a,b> / lambda_a.
 */
inline QuasiProbability quasiprobability_pauli_inverse(const TransferMap& pauli_channel) {
  const RMat& t = pauli_channel.full;
  const RVec lam = t.diagonal();
  if ((t - RMat(lam.asDiagonal())).cwiseAbs().maxCoeff() > 1e-12) throw ValidationError("channel is not a Pauli channel");
  if (lam.cwiseAbs().minCoeff() <= 1e-300) throw NonInvertibleError("Pauli channel has a zero eigenvalue", lam.cwiseAbs().minCoeff());
  const int n = pauli_channel.n;
  const std::uint64_t q4 = pow4(n);
  QuasiProbability out;
  out.q = RVec::Zero(static_cast<Eigen::Index>(q4));
  for (std::uint64_t b = 0; b < q4; ++b) {
    double acc = 0.0;
    for (std::uint64_t a = 0; a < q4; ++a) {
      const double s = detail::paulis_anticommute({n, a}, {n, b}) ? -1.0 : 1.0;
      acc += s / lam(static_cast<Eigen::Index>(a));
    }
    out.q(static_cast<Eigen::Index>(b)) = acc / static_cast<double>(q4);
  }
  out.gamma = out.q.cwiseAbs().sum();
  return out;
}

/// Cost (|x|^2/eps^2) gamma^(2L) for a layer decomposed over `dictionary`.
inline CostReport pec_cost(const TransferMap& noise_layer, const std::vector<TransferMap>& dictionary,
                           std::size_t depth, double eps = 1.0, double x_norm = 1.0) {
  const QuasiProbability qp = quasiprobability_lp(inverse_channel(noise_layer), dictionary);
  CostReport r;
  r.method = "pec-lp";
  r.n = noise_layer.n;
  r.L = depth;
  r.eps = eps;
  r.x_norm = x_norm;
  detail::set_log_value(r, detail::log_prefactor(x_norm, eps) + 2.0 * static_cast<double>(depth) * std::log(qp.gamma));
  return r;
}

/**
 * Per-layer gamma of a built-in model. Local models are decomposed per qubit
 * and the factors multiplied; global depolarizing is decomposed on the full
 * register (closed form, or LP when `use_lp`).
 */
inline double pec_layer_gamma(const NoiseModel& model, bool use_lp = true) {
  model.validate();
  if (model.kind == NoiseKind::GlobalDepolarizing) {
    const TransferMap inv_target = make_noise(model);
    if (use_lp && model.n <= 2) return quasiprobability_lp(inverse_channel(inv_target), pauli_dictionary(model.n)).gamma;
    return quasiprobability_pauli_inverse(inv_target).gamma;
  }
  const TransferMap one = single_qubit_noise(model.kind, model.p);
  double g = 0.0;
  if (use_lp || model.kind == NoiseKind::AmplitudeDamping) {
    g = quasiprobability_lp(inverse_channel(one), default_dictionary(model.kind)).gamma;
  } else {
    g = quasiprobability_pauli_inverse(one).gamma;
  }
  return std::pow(g, model.n);
}

inline CostReport pec_cost(const NoiseModel& model, std::size_t depth, double eps, double x_norm) {
  CostReport r;
  r.method = "pec-lp";
  r.n = model.n;
  r.L = depth;
  r.p = model.p;
  r.eps = eps;
  r.x_norm = x_norm;
  detail::set_log_value(r, detail::log_prefactor(x_norm, eps) +
                               2.0 * static_cast<double>(depth) * std::log(pec_layer_gamma(model)));
  return r;
}

// ---------------------------------------------------------------------------
// Generalized subspace expansion
// ---------------------------------------------------------------------------

struct GseResult {
  double c1 = 0.0;
  double c2 = 1.0;
  double cost = 1.0;
  double residual_bias = 0.0;     // ||m - rho||_F
  double unmitigated_bias = 0.0;  // ||E'(rho) - rho||_F
  bool converged = false;
};

/// m(c1, c2) = c1^2/4^n I + c1 c2/2^(n-1) s + c2^2 s^2
inline CMat gse_state(double c1, double c2, const CMat& s, const CMat& s2) {
  const int n = qubits_from_dim(s.rows());
  return c1 * c1 / static_cast<double>(pow4(n)) * CMat::Identity(s.rows(), s.cols()) +
         c1 * c2 / static_cast<double>(pow2(n - 1)) * s + c2 * c2 * s2;
}

/// (|c1 c2| / 2^(n-1) + c2^2)^2
inline double gse_cost_formula(double c1, double c2, int n) {
  const double v = std::abs(c1 * c2) / static_cast<double>(pow2(n - 1)) + c2 * c2;
  return v * v;
}

/**
 * Real (c1, c2) minimizing ||m(c1, c2) - rho||_F subject to tr m = 1.
 *
 * m is homogeneous of degree two in (c1, c2), so the trace constraint fixes
 * the scale along each direction (cos phi, sin phi) and the search is over
 * phi in [0, pi) only: a grid scan followed by golden-section refinement.
 */
inline GseResult gse_cost(const TransferMap& eff, const DensityMatrix& ideal) {
  validate_density(ideal, 1e-9);
  const int n = eff.n;
  const double d = static_cast<double>(pow2(n));
  const CMat s = eff.apply(ideal);
  const CMat s2 = s * s;
  const double purity = s2.trace().real();
  auto scaled = [&](double phi) {
    const double u1 = std::cos(phi), u2 = std::sin(phi);
    const double tr = u1 * u1 / d + 2.0 * u1 * u2 / d + u2 * u2 * purity;
    return std::array<double, 3>{u1, u2, tr};
  };
  auto objective = [&](double phi) {
    const auto [u1, u2, tr] = scaled(phi);
    if (!(tr > 1e-14)) return std::numeric_limits<double>::max();
    const double k = 1.0 / std::sqrt(tr);
    return (gse_state(k * u1, k * u2, s, s2) - ideal).norm();
  };
  const Minimum1d best = grid_then_golden(objective, 0.0, std::numbers::pi, 4096, 1e-15);
  const double phi = level_set_center(objective, best.x, best.fx, 1e-10);
  const auto [u1, u2, tr] = scaled(phi);
  const double k = 1.0 / std::sqrt(tr);
  GseResult r;
  r.c1 = k * u1;
  r.c2 = k * u2;
  if (r.c2 < 0) {
    r.c1 = -r.c1;
    r.c2 = -r.c2;
  }
  r.cost = gse_cost_formula(r.c1, r.c2, n);
  r.residual_bias = objective(phi);
  r.unmitigated_bias = (s - ideal).norm();
  r.converged = best.converged && std::isfinite(best.fx);
  return r;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class Method { Rescaling, Pec, Gse };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Rescaling: return "rescaling";
    case Method::Pec: return "pec";
    case Method::Gse: return "gse";
  }
  return "unknown";
}

inline Method method_from_string(const std::string& s) {
  if (s == "rescaling") return Method::Rescaling;
  if (s == "pec") return Method::Pec;
  if (s == "gse") return Method::Gse;
  throw ValidationError("unknown method '" + s + "'");
}

struct SweepConfig {
  Method method = Method::Rescaling;
  NoiseModel model;
  Ensemble ensemble = Ensemble::CliffordUniform;
  std::vector<std::size_t> depths;
  double eps = 0.1;
  Observable obs;
  std::size_t shots = 10000;
  std::vector<std::uint64_t> seeds{1};
  int threads = 1;
};

struct SweepRow {
  CostReport report;
  double bias = 0.0;  // mean over seeds; rescaling: exact estimator bias, gse: residual Frobenius bias
};

/**
 * Empirical cost per depth, averaged over seeds. Jobs are keyed by
 * (depth, seed) and gathered by index, so output does not depend on threads.
 */
inline std::vector<SweepRow> empirical_cost_sweep(const SweepConfig& cfg) {
  cfg.model.validate();
  if (cfg.seeds.empty()) throw ValidationError("at least one seed required");
  const TransferMap noise = make_noise(cfg.model);
  const double x_norm = cfg.obs.coeffs.norm();
  const std::size_t ns = cfg.seeds.size();
  const std::size_t jobs = cfg.depths.size() * ns;
  std::vector<double> cost(jobs, 0.0), bias(jobs, 0.0);
  double pec_gamma = 1.0;
  if (cfg.method == Method::Pec) pec_gamma = pec_layer_gamma(cfg.model);
  parallel_for(jobs, cfg.threads, [&](std::size_t job) {
    const std::size_t li = job / ns, si = job % ns;
    const std::size_t depth = cfg.depths[li];
    if (cfg.method == Method::Pec) {
      cost[job] = x_norm * x_norm / (cfg.eps * cfg.eps) * std::exp(2.0 * static_cast<double>(depth) * std::log(pec_gamma));
      return;
    }
    std::mt19937_64 rng(derive_seed(cfg.seeds[si], depth, 1));
    const LayeredCircuit circ = random_circuit(cfg.model.n, depth, cfg.ensemble, noise, rng);
    if (cfg.method == Method::Rescaling) {
      const auto r = rescaling_estimate(circ, cfg.obs, cfg.model, cfg.eps, cfg.shots, derive_seed(cfg.seeds[si], depth, 2));
      cost[job] = cfg.shots > 1 ? r.empirical_cost : r.analytic_cost;
      bias[job] = r.bias;
    } else {
      const auto g = gse_cost(compile_effective(circ).map, ideal_output(circ));
      cost[job] = x_norm * x_norm / (cfg.eps * cfg.eps) * g.cost;
      bias[job] = g.residual_bias;
    }
  });
  std::vector<SweepRow> rows;
  for (std::size_t li = 0; li < cfg.depths.size(); ++li) {
    double c = 0.0, b = 0.0;
    for (std::size_t si = 0; si < ns; ++si) {
      c += cost[li * ns + si];
      b += bias[li * ns + si];
    }
    SweepRow row;
    row.report.method = to_string(cfg.method);
    row.report.n = cfg.model.n;
    row.report.L = cfg.depths[li];
    row.report.p = cfg.model.p;
    row.report.eps = cfg.eps;
    row.report.x_norm = x_norm;
    row.report.value = c / static_cast<double>(ns);
    row.report.log_value = std::log(row.report.value);
    row.report.seed = cfg.seeds.front();
    row.report.samples = cfg.method == Method::Rescaling ? cfg.shots * ns : ns;
    row.bias = b / static_cast<double>(ns);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qemb

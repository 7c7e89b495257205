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
#include <string>
#include <utility>
#include <vector>

#include "qemb/channel.hpp"
#include "qemb/circuit.hpp"

namespace qemb {

/**
 * One point of a cost curve. value is a copy count N; log_value is kept so
 * that deep circuits stay representable.
 */
struct CostReport {
  std::string method;
  int n = 1;
  std::size_t L = 1;
  double p = 0.0;
  double eps = 1.0;
  double x_norm = 1.0;
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  /// Set when the bound is not defined for the inputs (beta = 0, non-unital, ...).
  std::string note;

  /// N eps^2 / ||x||^2
  double scale_free() const { return value * eps * eps / (x_norm * x_norm); }
};

namespace detail {

inline void set_log_value(CostReport& r, double log_v) {
  r.log_value = log_v;
  r.value = std::exp(log_v);
}

inline double log_prefactor(double x_norm, double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (x_norm < 0.0) throw ValidationError("x_norm must be non-negative");
  return 2.0 * (std::log(x_norm) - std::log(eps));
}

}  // namespace detail

/**
 * Worst-case bound N >= (|x|^2/eps^2) beta gamma^(2L); the unital form uses
 * 1 - (1 - beta)^L in place of beta.
 */
inline CostReport worst_case_bound(double x_norm, double eps, double beta, double gamma, std::size_t depth, bool unital) {
  CostReport r;
  r.method = unital ? "worst-case-unital" : "worst-case";
  r.L = depth;
  r.eps = eps;
  r.x_norm = x_norm;
  if (depth < 1) throw ValidationError("worst_case_bound: L >= 1 required");
  if (gamma < 1.0 - 1e-12) throw ValidationError("worst_case_bound: gamma >= 1 required");
  if (beta < 0.0 || beta > 1.0) throw ValidationError("worst_case_bound: beta must lie in [0, 1]");
  const double lp = detail::log_prefactor(x_norm, eps);
  if (!(beta > 0.0)) {
    r.note = "beta=0: condition (II) fails, bound trivially 0";
    r.value = 0.0;
    return r;
  }
  const double l = static_cast<double>(depth);
  double log_beta = std::log(beta);
  if (unital) log_beta = beta >= 1.0 ? 0.0 : std::log(-std::expm1(l * std::log1p(-beta)));
  detail::set_log_value(r, lp + log_beta + 2.0 * l * std::log(gamma));
  return r;
}

/**
 * Average-case bound for unital noise:
 * (|x|^2/eps^2) (prod_{l=1}^{L-1} (4^n nu_l - 1)/(4^n - 1) - (2^n - 2)/(4^n - 1)).
 * nu_layers[l-1] is nu of the full layer inverse.
 */
inline CostReport average_bound(const std::vector<double>& nu_layers, int n, std::size_t depth, double x_norm,
                                     double eps) {
  check_qubits(n);
  if (depth < 1) throw ValidationError("average_bound: L >= 1 required");
  if (nu_layers.size() + 1 < depth) throw ValidationError("average_bound: need nu for layers 1..L-1");
  const double q = static_cast<double>(pow4(n));
  const double d = static_cast<double>(pow2(n));
  double log_prod = 0.0;
  for (std::size_t l = 0; l + 1 < depth; ++l) {
    const double f = (q * nu_layers[l] - 1.0) / (q - 1.0);
    if (!(f > 0.0)) throw ValidationError("average_bound: nu below 1/d^2");
    log_prod += std::log(f);
  }
  const double shift = (d - 2.0) / (q - 1.0);
  CostReport r;
  r.method = "average";
  r.n = n;
  r.L = depth;
  r.eps = eps;
  r.x_norm = x_norm;
  const double ratio = shift * std::exp(-log_prod);
  if (ratio >= 1.0) {
    r.value = 0.0;
    r.note = "average bound not positive";
    return r;
  }
  detail::set_log_value(r, detail::log_prefactor(x_norm, eps) + log_prod + std::log1p(-ratio));
  return r;
}

inline CostReport average_bound(double nu_layer, int n, std::size_t depth, double x_norm, double eps) {
  return average_bound(std::vector<double>(depth > 0 ? depth - 1 : 0, nu_layer), n, depth, x_norm, eps);
}

/// Per-layer rate (4^n nu0^n - 2^n eta0^n) / (4^n - 1) for homogeneous single-qubit noise.
inline double nonunital_average_rate(double nu0, double eta0, int n) {
  check_qubits(n);
  const double q = static_cast<double>(pow4(n));
  const double d = static_cast<double>(pow2(n));
  return (q * std::pow(nu0, n) - d * std::pow(eta0, n)) / (q - 1.0);
}

/**
 * Rate-only form of the non-unital average bound: (|x|^2/eps^2) r^L. The
 * constant in front of r^L is not known; `prefactor` stays NaN.
 */
struct NonunitalRateReport {
  CostReport report;
  double rate = 1.0;
  double prefactor = std::numeric_limits<double>::quiet_NaN();
};

inline NonunitalRateReport nonunital_rate_report(double nu0, double eta0, int n, std::size_t depth, double x_norm, double eps) {
  NonunitalRateReport t;
  t.rate = nonunital_average_rate(nu0, eta0, n);
  t.report.method = "average-rate";
  t.report.n = n;
  t.report.L = depth;
  t.report.eps = eps;
  t.report.x_norm = x_norm;
  t.report.note = "rate only; prefactor unknown";
  detail::set_log_value(t.report, detail::log_prefactor(x_norm, eps) + static_cast<double>(depth) * std::log(t.rate));
  return t;
}

/// Haar-averaged nu after one more layer, unital case.
inline double nu_recursion(double nu_prev, double nu_layer, double d) {
  if (d < 2.0) throw ValidationError("nu_recursion: d >= 2 required");
  const double d2 = d * d;
  return (d2 * nu_layer - 1.0) / (d2 - 1.0) * (nu_prev - 1.0 / d2) + 1.0 / d2;
}

/// Haar-averaged (nu, eta) after one more layer, general case.
inline std::pair<double, double> nu_eta_recursion(double nu_prev, double eta_prev, double nu_layer, double eta_layer,
                                                  double d) {
  if (d < 2.0) throw ValidationError("nu_eta_recursion: d >= 2 required");
  const double d2 = d * d;
  const double m00 = d2 * nu_layer - 1.0, m01 = d - d * nu_layer;
  const double m10 = d2 * eta_layer - d, m11 = d2 - d * eta_layer;
  return {(m00 * nu_prev + m01 * eta_prev) / (d2 - 1.0), (m10 * nu_prev + m11 * eta_prev) / (d2 - 1.0)};
}

/**
 * Reference curves for one noise model over a depth list: worst-case bound
 * (when beta > 0), the average bound (unital) or its rate (non-unital), and
 * the analytic rescaling cost (|x|^2/eps^2)(1-p)^(-2 k_mean L).
 */
inline std::vector<CostReport> reference_curves(const NoiseModel& model, const std::vector<std::size_t>& depths,
                                                     double eps, double x_norm) {
  model.validate();
  const TransferMap noise = make_noise(model);
  const double beta = model_beta(model);
  const double gamma = noise_strength(noise);
  const TransferMap inv = inverse_channel(noise);
  const double nu_layer = nu(inv);
  const TransferMap single_inv = inverse_channel(single_qubit_noise(model.kind, model.p));
  const double nu0 = nu(single_inv), eta0 = eta(single_inv);
  const double k = k_mean_theory(model);
  std::vector<CostReport> out;
  auto stamp = [&](CostReport r) {
    r.n = model.n;
    r.p = model.p;
    out.push_back(std::move(r));
  };
  for (std::size_t depth : depths) {
    stamp(worst_case_bound(x_norm, eps, std::min(beta, 1.0), std::max(gamma, 1.0), depth, model.is_unital()));
    if (model.is_unital()) {
      stamp(average_bound(nu_layer, model.n, depth, x_norm, eps));
    } else {
      stamp(nonunital_rate_report(nu0, eta0, model.n, depth, x_norm, eps).report);
    }
    CostReport resc;
    resc.method = "rescaling-analytic";
    resc.L = depth;
    resc.eps = eps;
    resc.x_norm = x_norm;
    detail::set_log_value(resc, detail::log_prefactor(x_norm, eps) -
                                    2.0 * k * static_cast<double>(depth) * std::log1p(-model.p));
    stamp(resc);
  }
  return out;
}

}  // namespace qemb

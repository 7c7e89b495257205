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
#include <functional>
#include <limits>

namespace qemb {

struct Minimum1d {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Golden-section search on [a, b] for a unimodal f.
inline Minimum1d golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                                int max_iter = 400) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  Minimum1d out;
  out.evaluations = 2;
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    ++out.evaluations;
  }
  out.converged = (b - a) <= tol;
  out.x = f1 <= f2 ? x1 : x2;
  out.fx = std::min(f1, f2);
  return out;
}

/// Uniform grid scan followed by golden-section refinement around the best cell.
inline Minimum1d grid_then_golden(const std::function<double(double)>& f, double a, double b, int grid = 256,
                                  double tol = 1e-13) {
  const double h = (b - a) / grid;
  int best = 0;
  double best_f = f(a);
  for (int i = 1; i <= grid; ++i) {
    const double v = f(a + i * h);
    if (v < best_f) {
      best_f = v;
      best = i;
    }
  }
  const double lo = a + std::max(0, best - 1) * h;
  const double hi = a + std::min(grid, best + 1) * h;
  Minimum1d m = golden_section(f, lo, hi, tol);
  m.evaluations += grid + 1;
  if (best_f < m.fx) {
    m.x = a + best * h;
    m.fx = best_f;
  }
  return m;
}

/**
 * Midpoint of the sublevel set {x : f(x) <= f(x0) + tau} around a located
 * minimum x0. For minima whose residual grows only quadratically in the
 * argument, the point estimate from function values is accurate to about
 * sqrt(machine epsilon); the level-set midpoint cancels the leading error.
 */
inline double level_set_center(const std::function<double(double)>& f, double x0, double f0, double tau,
                               double max_width = 1e-2) {
  const double level = f0 + tau;
  auto boundary = [&](double dir) {
    double inside = 0.0, h = 1e-12;
    while (h < max_width && f(x0 + dir * h) <= level) {
      inside = h;
      h *= 2.0;
    }
    if (h >= max_width) return std::numeric_limits<double>::quiet_NaN();
    double lo = inside, hi = h;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(x0 + dir * mid) <= level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double right = boundary(1.0), left = boundary(-1.0);
  if (!std::isfinite(left) || !std::isfinite(right)) return x0;
  const double center = x0 + 0.5 * (right - left);
  return f(center) <= level ? center : x0;
}

}  // namespace qemb

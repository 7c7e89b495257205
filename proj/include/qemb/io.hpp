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

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qemb/bounds.hpp"
#include "qemb/channel.hpp"
#include "qemb/circuit.hpp"

namespace qemb {

/// Shortest-roundtrip-safe text for a double: 17 significant digits.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kCostCsvHeader = "method,n,L,p,eps,x_norm,value,seed,samples";

inline std::string to_csv_row(const CostReport& r) {
  std::ostringstream os;
  os << r.method << ',' << r.n << ',' << r.L << ',' << fmt17(r.p) << ',' << fmt17(r.eps) << ',' << fmt17(r.x_norm)
     << ',' << fmt17(r.value) << ',' << r.seed << ',' << r.samples;
  return os.str();
}

inline void write_cost_csv(std::ostream& os, const std::vector<CostReport>& rows) {
  os << kCostCsvHeader << '\n';
  for (const auto& r : rows) os << to_csv_row(r) << '\n';
}

inline nlohmann::ordered_json to_json(const CostReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["n"] = r.n;
  j["L"] = r.L;
  j["p"] = r.p;
  j["eps"] = r.eps;
  j["x_norm"] = r.x_norm;
  j["value"] = r.value;
  j["log_value"] = r.log_value;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline nlohmann::ordered_json to_json(const NoiseModel& m) {
  return {{"kind", to_string(m.kind)}, {"n", m.n}, {"p", m.p}};
}

inline NoiseModel noise_model_from_json(const nlohmann::json& j) {
  NoiseModel m;
  m.kind = noise_kind_from_string(j.at("kind").get<std::string>());
  m.n = j.at("n").get<int>();
  m.p = j.at("p").get<double>();
  m.validate();
  return m;
}

struct CircuitSpec {
  int n = 2;
  std::size_t L = 1;
  Ensemble ensemble = Ensemble::Haar;
  NoiseKind noise_kind = NoiseKind::GlobalDepolarizing;
  double p = 0.0;
  std::uint64_t seed = 0;

  NoiseModel model() const { return {noise_kind, p, n}; }
};

inline nlohmann::ordered_json to_json(const CircuitSpec& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["L"] = c.L;
  j["ensemble"] = to_string(c.ensemble);
  j["noise"] = {{"kind", to_string(c.noise_kind)}, {"p", c.p}};
  j["seed"] = c.seed;
  return j;
}

inline CircuitSpec circuit_spec_from_json(const nlohmann::json& j) {
  CircuitSpec c;
  c.n = j.at("n").get<int>();
  c.L = j.at("L").get<std::size_t>();
  c.ensemble = ensemble_from_string(j.at("ensemble").get<std::string>());
  c.noise_kind = noise_kind_from_string(j.at("noise").at("kind").get<std::string>());
  c.p = j.at("noise").at("p").get<double>();
  c.seed = j.value("seed", std::uint64_t{0});
  c.model().validate();
  return c;
}

/// Row-major PTM, one row per line.
inline void write_ptm_csv(std::ostream& os, const TransferMap& t) {
  for (Eigen::Index i = 0; i < t.full.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.full.cols(); ++j) {
      if (j) os << ',';
      os << fmt17(t.full(i, j));
    }
    os << '\n';
  }
}

inline TransferMap read_ptm_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  const auto dim = static_cast<Eigen::Index>(rows.size());
  int n = 0;
  while (static_cast<Eigen::Index>(pow4(n)) < dim) ++n;
  if (dim == 0 || static_cast<Eigen::Index>(pow4(n)) != dim) throw ValidationError("PTM CSV is not 4^n x 4^n");
  TransferMap t{n, RMat(dim, dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != dim) throw ValidationError("ragged PTM CSV");
    for (Eigen::Index j = 0; j < dim; ++j) t.full(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return t;
}

}  // namespace qemb

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

// qemb: bound curves, empirical mitigation costs, singular-exponent
// convergence and validation suites, emitted as CSV or JSON.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "qemb/io.hpp"
#include "qemb/qemb.hpp"

namespace {

using qemb::ValidationError;
using json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  int n = 2;
  std::string L = "1..50";
  std::string noise = "global-dep";
  double p = 0.01;
  std::string ensemble = "clifford";
  double eps = 0.1;
  std::string x = "single-Z";
  std::size_t shots = 10000;
  std::string seeds;
  std::string out;
  std::string format = "csv";
  int threads = qemb::default_threads();
  std::string method = "all";
  std::size_t samples = 20000;
  bool json_out = false;
};

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_size(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw ValidationError("not an integer: '" + s + "'");
  return static_cast<std::size_t>(v);
}

/// "a..b" inclusive, "a,b,c", or "a..b:logN" (N log-spaced depths, deduplicated).
std::vector<std::size_t> parse_depths(const std::string& spec) {
  std::vector<std::size_t> out;
  try {
    const auto range = spec.find("..");
    if (range == std::string::npos) {
      for (const auto& tok : split(spec, ',')) out.push_back(parse_size(tok));
    } else {
      const std::size_t a = parse_size(spec.substr(0, range));
      std::string rest = spec.substr(range + 2);
      std::size_t count = 0;
      if (const auto colon = rest.find(':'); colon != std::string::npos) {
        const std::string mode = rest.substr(colon + 1);
        if (mode.rfind("log", 0) != 0) throw ValidationError("range suffix must be ':logN'");
        count = parse_size(mode.substr(3));
        rest = rest.substr(0, colon);
      }
      const std::size_t b = parse_size(rest);
      if (b < a) throw ValidationError("empty depth range '" + spec + "'");
      if (count == 0) {
        for (std::size_t l = a; l <= b; ++l) out.push_back(l);
      } else {
        if (a == 0) throw ValidationError("log-spaced ranges need a >= 1");
        const double la = std::log(static_cast<double>(a)), lb = std::log(static_cast<double>(b));
        std::set<std::size_t> uniq;
        for (std::size_t i = 0; i < count; ++i) {
          const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
          uniq.insert(static_cast<std::size_t>(std::llround(std::exp(la + t * (lb - la)))));
        }
        out.assign(uniq.begin(), uniq.end());
      }
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ValidationError*>(&e)) throw;
    throw ValidationError("cannot parse depth list '" + spec + "'");
  }
  if (out.empty()) throw ValidationError("no depths given");
  for (std::size_t l : out) {
    if (l == 0) throw ValidationError("depths must be >= 1");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

qemb::Observable parse_observable(const std::string& spec, int n) {
  if (spec == "single-Z" || spec == "single-z") return qemb::single_z(n);
  const auto toks = split(spec, ',');
  qemb::Observable o{n, qemb::RVec(static_cast<Eigen::Index>(toks.size()))};
  for (std::size_t i = 0; i < toks.size(); ++i) {
    try {
      o.coeffs(static_cast<Eigen::Index>(i)) = std::stod(toks[i]);
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse observable coefficient '" + toks[i] + "'");
    }
  }
  if (static_cast<std::uint64_t>(o.coeffs.size()) != qemb::pow4(n) - 1) {
    throw ValidationError("--x needs 4^n - 1 = " + std::to_string(qemb::pow4(n) - 1) + " coefficients");
  }
  return o;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  for (const auto& tok : split(spec, ',')) {
    try {
      out.push_back(parse_size(tok));
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse seed '" + tok + "'");
    }
  }
  if (out.empty()) throw ValidationError("no seeds given");
  return out;
}

std::string default_seed() {
  const char* env = std::getenv("QEMB_SEED");
  return env && *env ? std::string(env) : std::string("1");
}

/// Fills options not given on the command line from a JSON config file.
void apply_config_file(const std::string& path, CLI::App& app, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
  }
  auto unset = [&](const std::string& flag) { return app.get_option(flag)->count() == 0; };
  auto as_list = [](const nlohmann::json& v) {
    if (!v.is_array()) return v.is_string() ? v.get<std::string>() : v.dump();
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
    return s;
  };
  try {
    if (j.contains("n") && unset("--n")) cfg.n = j["n"].get<int>();
    if (j.contains("L") && unset("--L")) cfg.L = as_list(j["L"]);
    if (j.contains("noise") && unset("--noise")) {
      const auto& nz = j["noise"];
      if (nz.is_object()) {
        cfg.noise = nz.at("kind").get<std::string>();
        if (nz.contains("p") && unset("--p")) cfg.p = nz["p"].get<double>();
      } else {
        cfg.noise = nz.get<std::string>();
      }
    }
    if (j.contains("p") && unset("--p")) cfg.p = j["p"].get<double>();
    if (j.contains("ensemble") && unset("--ensemble")) cfg.ensemble = j["ensemble"].get<std::string>();
    if (j.contains("eps") && unset("--eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("x") && unset("--x")) cfg.x = as_list(j["x"]);
    if (j.contains("shots") && unset("--shots")) cfg.shots = j["shots"].get<std::size_t>();
    if (j.contains("seeds") && unset("--seeds")) cfg.seeds = as_list(j["seeds"]);
    if (j.contains("seed") && unset("--seeds")) cfg.seeds = as_list(j["seed"]);
    if (j.contains("out") && unset("--out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("format") && unset("--format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("threads") && unset("--threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("method") && unset("--method")) cfg.method = j["method"].get<std::string>();
    if (j.contains("samples") && unset("--samples")) cfg.samples = j["samples"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
}

struct Resolved {
  qemb::NoiseModel model;
  qemb::Ensemble ensemble = qemb::Ensemble::CliffordUniform;
  std::vector<std::size_t> depths;
  qemb::Observable obs;
  std::vector<std::uint64_t> seeds;
};

/// Validates every field before any computation starts.
Resolved resolve(const RunConfig& cfg) {
  Resolved r;
  qemb::check_qubits(cfg.n);
  r.model = {qemb::noise_kind_from_string(cfg.noise), cfg.p, cfg.n};
  r.model.validate();
  r.ensemble = qemb::ensemble_from_string(cfg.ensemble);
  r.depths = parse_depths(cfg.L);
  r.obs = parse_observable(cfg.x, cfg.n);
  r.seeds = parse_seeds(cfg.seeds);
  if (!(cfg.eps > 0.0)) throw ValidationError("--eps must be positive");
  if (cfg.format != "csv" && cfg.format != "json") throw ValidationError("--format must be csv or json");
  if (cfg.threads < 1) throw ValidationError("--threads must be >= 1");
  return r;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_reports(const RunConfig& cfg, const std::vector<qemb::CostReport>& rows) {
  Output out(cfg.out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(qemb::to_json(r));
    out.stream() << arr.dump(2) << '\n';
  } else {
    qemb::write_cost_csv(out.stream(), rows);
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_bound(const RunConfig& cfg) {
  const Resolved r = resolve(cfg);
  const auto rows = qemb::reference_curves(r.model, r.depths, cfg.eps, r.obs.coeffs.norm());
  emit_reports(cfg, rows);
  return 0;
}

int cmd_cost_sweep(const RunConfig& cfg) {
  const Resolved r = resolve(cfg);
  std::vector<qemb::Method> methods;
  if (cfg.method == "all") {
    methods = {qemb::Method::Rescaling, qemb::Method::Pec, qemb::Method::Gse};
  } else {
    for (const auto& m : split(cfg.method, ',')) methods.push_back(qemb::method_from_string(m));
  }
  if (cfg.shots < 1) throw ValidationError("--shots must be >= 1");
  std::vector<qemb::CostReport> rows;
  for (qemb::Method m : methods) {
    qemb::SweepConfig sc;
    sc.method = m;
    sc.model = r.model;
    sc.ensemble = r.ensemble;
    sc.depths = r.depths;
    sc.eps = cfg.eps;
    sc.obs = r.obs;
    sc.shots = cfg.shots;
    sc.seeds = r.seeds;
    sc.threads = cfg.threads;
    for (auto& row : qemb::empirical_cost_sweep(sc)) rows.push_back(row.report);
  }
  emit_reports(cfg, rows);
  return 0;
}

int cmd_converge(const RunConfig& cfg) {
  const Resolved r = resolve(cfg);
  if (!(cfg.p > 0.0)) throw ValidationError("converge needs p > 0");
  std::vector<std::vector<qemb::ConvergenceRow>> per_seed(r.seeds.size());
  qemb::parallel_for(r.seeds.size(), cfg.threads, [&](std::size_t i) {
    per_seed[i] = qemb::convergence_run(r.model, r.ensemble, r.depths, r.seeds[i]);
  });
  const double k_mean = qemb::k_mean_theory(r.model);
  Output out(cfg.out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
      for (const auto& row : per_seed[i]) {
        arr.push_back({{"noise", qemb::to_string(r.model.kind)}, {"ensemble", qemb::to_string(r.ensemble)},
                       {"n", r.model.n}, {"p", r.model.p}, {"L", row.depth}, {"seed", r.seeds[i]},
                       {"k_geo", row.k_geo}, {"k_min", row.k_min}, {"k_max", row.k_max}, {"k_mean_theory", k_mean}});
      }
    }
    out.stream() << arr.dump(2) << '\n';
  } else {
    auto& os = out.stream();
    os << "noise,ensemble,n,p,L,seed,k_geo,k_min,k_max,k_mean_theory\n";
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
      for (const auto& row : per_seed[i]) {
        os << qemb::to_string(r.model.kind) << ',' << qemb::to_string(r.ensemble) << ',' << r.model.n << ','
           << qemb::fmt17(r.model.p) << ',' << row.depth << ',' << r.seeds[i] << ',' << qemb::fmt17(row.k_geo) << ','
           << qemb::fmt17(row.k_min) << ',' << qemb::fmt17(row.k_max) << ',' << qemb::fmt17(k_mean) << '\n';
      }
    }
  }
  return 0;
}

void emit_moment_checks(const RunConfig& cfg, const std::vector<qemb::MomentCheck>& checks, std::ostream& os) {
  if (cfg.format == "json" || cfg.json_out) {
    json arr = json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"stderr", c.stderr_},
                     {"samples", c.n_samples}, {"z", c.z()}, {"passed", c.passed()}});
    }
    os << arr.dump(2) << '\n';
  } else {
    os << "name,lhs,rhs,stderr,samples,z,passed\n";
    for (const auto& c : checks) {
      os << c.name << ',' << qemb::fmt17(c.lhs) << ',' << qemb::fmt17(c.rhs) << ',' << qemb::fmt17(c.stderr_) << ','
         << c.n_samples << ',' << qemb::fmt17(c.z()) << ',' << (c.passed() ? "true" : "false") << '\n';
    }
  }
}

int cmd_moments(const RunConfig& cfg) {
  const Resolved r = resolve(cfg);
  if (cfg.samples < 2) throw ValidationError("--samples must be >= 2");
  const auto checks = qemb::verify_design(r.ensemble, cfg.n, cfg.samples, r.seeds.front());
  Output out(cfg.out);
  emit_moment_checks(cfg, checks, out.stream());
  // Only the Haar and Clifford samplers are 2-designs; other ensembles may fail.
  const bool design = r.ensemble == qemb::Ensemble::Haar || r.ensemble == qemb::Ensemble::CliffordUniform;
  return design && !qemb::all_passed(checks) ? 1 : 0;
}

struct SuiteResult {
  std::string name;
  bool expected_fail = false;
  bool passed = false;
  std::string detail;
};

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<SuiteResult> run_validation(std::uint64_t seed, std::size_t samples) {
  using namespace qemb;
  std::vector<SuiteResult> out;
  auto add = [&](std::string name, bool passed, std::string detail, bool xfail = false) {
    out.push_back({std::move(name), xfail, passed, std::move(detail)});
  };
  const NoiseKind kinds[] = {NoiseKind::GlobalDepolarizing, NoiseKind::LocalDepolarizing, NoiseKind::LocalDephasing,
                             NoiseKind::AmplitudeDamping};

  {
    std::mt19937_64 rng(derive_seed(seed, 1));
    double worst = 0.0;
    for (int t = 0; t < 40; ++t) {
      const int n = 1 + t % 2;
      const auto c = random_circuit(n, 1 + static_cast<std::size_t>(t % 8), Ensemble::Haar,
                                    make_noise({kinds[t % 4], 0.01 + 0.005 * (t % 7), n}), rng);
      const CMat via = compile_effective(c).map.apply(ideal_output(c));
      worst = std::max(worst, (via - noisy_output(c)).cwiseAbs().maxCoeff());
    }
    add("circuit:oracle-equivalence", worst < 1e-9, "max deviation " + short_num(worst));
  }
  {
    double worst = 0.0;
    for (double p : {0.001, 0.01, 0.1}) {
      const TransferMap inv = inverse_channel(single_qubit_noise(NoiseKind::LocalDepolarizing, p));
      const double closed = (4 - 2 * p + p * p) / (4 * (1 - p) * (1 - p));
      worst = std::max({worst, std::abs(nu(inv) - closed), std::abs(nu_choi(inv) - closed)});
    }
    add("channel:nu-closed-form", worst < 1e-12, "max deviation " + short_num(worst));
    const double e = eta(inverse_channel(single_qubit_noise(NoiseKind::AmplitudeDamping, 1e-4)));
    add("channel:eta-amp-damping-limit", std::abs(e - 0.5) < 1e-6, "eta(1e-4) = " + fmt17(e));
  }
  {
    const double b = beta_margin(make_noise({NoiseKind::GlobalDepolarizing, 0.01, 2})).value;
    add("channel:beta-global-dep", std::abs(b - 0.01) < 1e-6, "beta = " + fmt17(b));
  }
  {
    std::mt19937_64 rng(derive_seed(seed, 2));
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const int n = 1 + t % 2;
      const NoiseModel m{NoiseKind::GlobalDepolarizing, 0.02, n};
      const auto c = random_circuit(n, 1 + static_cast<std::size_t>(t), Ensemble::CliffordUniform, make_noise(m), rng);
      worst = std::max(worst, std::abs(rescaling_estimate(c, single_z(n), m, 0.1, 0, 0).bias));
    }
    add("mitigation:rescaling-unbiased", worst < 1e-12, "max |bias| " + short_num(worst));
  }
  {
    double worst = 0.0;
    for (double p : {0.01, 0.1}) {
      const TransferMap d = single_qubit_noise(NoiseKind::LocalDepolarizing, p);
      const TransferMap z = single_qubit_noise(NoiseKind::LocalDephasing, p);
      worst = std::max(worst, std::abs(quasiprobability_lp(inverse_channel(d), pauli_dictionary(1)).gamma -
                                       (2 + p) / (2 - 2 * p)));
      worst = std::max(worst, std::abs(quasiprobability_lp(inverse_channel(z), pauli_dictionary(1)).gamma -
                                       1 / (1 - p)));
    }
    add("mitigation:pec-closed-form", worst < 1e-9, "max deviation " + short_num(worst));
  }
  {
    std::mt19937_64 rng(derive_seed(seed, 3));
    const double p = 0.01;
    const auto c = random_circuit(2, 5, Ensemble::CliffordUniform, make_noise({NoiseKind::GlobalDepolarizing, p, 2}), rng);
    const GseResult g = gse_cost(compile_effective(c).map, ideal_output(c));
    const double q = std::pow(1 - p, 5);
    const double err = std::max(std::abs(g.c1 + (1 - q) / q), std::abs(g.c2 - 1 / q));
    add("mitigation:gse-global-dep", err < 1e-8 && g.residual_bias < 1e-10,
        "coefficient error " + short_num(err) + ", residual " + short_num(g.residual_bias));
  }
  {
    std::mt19937_64 rng(derive_seed(seed, 4));
    int checked = 0, violations = 0;
    for (int t = 0; t < 40 && checked < 20; ++t) {
      const int n = 1 + t % 2;
      const auto d = static_cast<Eigen::Index>(pow2(n));
      const Eigen::Index k = d + t % 3;
      const CMat u = haar_unitary(d * k, rng);
      std::vector<CMat> ops;
      for (Eigen::Index i = 0; i < k; ++i) ops.push_back(u.block(i * d, 0, d, d));
      const TransferMap ch = ptm_from_kraus(KrausChannel(n, ops));
      const BetaResult b = beta_margin(ch, 16, derive_seed(seed, 5, static_cast<std::uint64_t>(t)));
      if (b.value <= 1e-3) continue;
      ++checked;
      const double bound = *lemma_bound(n, 1, 1, b.value, noise_strength(ch), false);
      const CVec psi = haar_unitary(d, rng).col(0);
      const double j = qfi_bloch(ch, bloch_from_density(CMat(psi * psi.adjoint()))).max_eigenvalue();
      violations += j > bound + 1e-8;
    }
    add("fisher:single-layer-lemma", checked > 0 && violations == 0,
        std::to_string(checked) + " channels, " + std::to_string(violations) + " violations");
  }
  for (Ensemble e : {Ensemble::Haar, Ensemble::CliffordUniform}) {
    for (int n = 1; n <= 2; ++n) {
      const auto checks = verify_design(e, n, samples, derive_seed(seed, 6, static_cast<std::uint64_t>(n)));
      double worst = 0.0;
      for (const auto& c : checks) worst = std::max(worst, std::abs(c.z()));
      add("moments:design-" + to_string(e) + "-n" + std::to_string(n), all_passed(checks),
          "max |z| " + short_num(worst));
    }
  }
  {
    const auto checks = verify_design(Ensemble::HardwareEfficient, 2, samples, derive_seed(seed, 7));
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, std::abs(c.z()));
    add("moments:design-hardware-efficient-single-layer", all_passed(checks), "max |z| " + short_num(worst), true);
  }
  {
    const auto checks =
        mc_nu_recursion_check(single_qubit_noise(NoiseKind::LocalDepolarizing, 0.05), 3, 2000, derive_seed(seed, 8));
    add("moments:nu-recursion", all_passed(checks), "z = " + short_num(checks[0].z()));
  }
  {
    const NoiseModel m{NoiseKind::LocalDepolarizing, 1e-3, 2};
    const auto rows = convergence_run(m, Ensemble::HardwareEfficient, {1, 8, 64, 512}, derive_seed(seed, 9));
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, std::abs(row.k_geo - k_mean_theory(m)));
    add("circuit:k-geo-invariance", worst < 1e-8, "max deviation " + short_num(worst));
  }
  return out;
}

int cmd_validate(const RunConfig& cfg) {
  qemb::check_qubits(cfg.n);
  const auto seeds = parse_seeds(cfg.seeds);
  if (cfg.samples < 1000) throw ValidationError("--samples must be >= 1000 for design checks");
  const auto results = run_validation(seeds.front(), cfg.samples);
  int unexpected = 0;
  for (const auto& r : results) unexpected += r.passed == r.expected_fail;
  Output out(cfg.out);
  auto& os = out.stream();
  if (cfg.json_out || cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : results) {
      const char* status = r.expected_fail ? (r.passed ? "XPASS" : "XFAIL") : (r.passed ? "PASS" : "FAIL");
      arr.push_back({{"name", r.name}, {"status", status}, {"expected_fail", r.expected_fail}, {"detail", r.detail}});
    }
    os << json{{"results", arr}, {"unexpected", unexpected}}.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      const char* status = r.expected_fail ? (r.passed ? "XPASS" : "XFAIL") : (r.passed ? "PASS" : "FAIL");
      os << status << ' ' << r.name << ": " << r.detail << '\n';
    }
    os << (unexpected == 0 ? "all checks behaved as expected" : std::to_string(unexpected) + " unexpected result(s)")
       << '\n';
  }
  return unexpected == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost bounds and empirical costs of quantum error mitigation"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  cfg.seeds = default_seed();
  std::string config_path;

  app.add_option("--n", cfg.n, "qubit count");
  app.add_option("--L", cfg.L, "depths: a..b, a,b,c or a..b:logN");
  app.add_option("--noise", cfg.noise, "global-dep | local-dep | dephasing | amp-damping");
  app.add_option("--p", cfg.p, "error rate per layer");
  app.add_option("--ensemble", cfg.ensemble, "haar | clifford | pairs | hardware-efficient");
  app.add_option("--eps", cfg.eps, "target standard deviation");
  app.add_option("--x", cfg.x, "observable: single-Z or 4^n-1 Pauli coefficients");
  app.add_option("--shots", cfg.shots, "shots per circuit (cost-sweep)");
  app.add_option("--seeds", cfg.seeds, "comma-separated seeds (default QEMB_SEED or 1)");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--format", cfg.format, "csv | json");
  app.add_option("--threads", cfg.threads, "worker threads");
  app.add_option("--method", cfg.method, "cost-sweep methods: all or a list of rescaling,pec,gse");
  app.add_option("--samples", cfg.samples, "Monte-Carlo samples for moment checks");
  app.add_option("--config", config_path, "JSON config; flags override its values");
  app.add_flag("--json", cfg.json_out, "machine-readable validate/moments output");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"bound", "worst-case and average bound curves with the analytic rescaling cost"},
      {"cost-sweep", "empirical rescaling, PEC and GSE costs over depths"},
      {"converge", "singular exponents of the effective channel versus depth"},
      {"validate", "run the invariant suites"},
      {"moments", "first and second moment checks of a unitary sampler"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    if (!config_path.empty()) apply_config_file(config_path, app, cfg);
    if (cfg.command == "bound") return cmd_bound(cfg);
    if (cfg.command == "cost-sweep") return cmd_cost_sweep(cfg);
    if (cfg.command == "converge") return cmd_converge(cfg);
    if (cfg.command == "validate") return cmd_validate(cfg);
    if (cfg.command == "moments") return cmd_moments(cfg);
  } catch (const std::exception& e) {
    std::cerr << "qemb: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

//
// Copyright 2026 The noisemech Authors
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
//

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "noisemech/format.h"
#include "noisemech/function_spec.h"
#include "noisemech/gaussian.h"
#include "noisemech/hypercube.h"
#include "noisemech/mechanism.h"
#include "noisemech/noise.h"
#include "noisemech/optimize.h"

namespace noisemech {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

MechanismParams make(int n, double delta, double b, Setting s = Setting::kNoisyReport) {
  MechanismParams p;
  p.n = n;
  p.delta = delta;
  p.b = b;
  p.setting = s;
  return p;
}

DenseFunction truth_table(std::uint64_t id, int n) {
  return DenseFunction::tabulate(n, [id](std::uint32_t x) { return static_cast<double>((id >> x) & 1u); });
}

std::string num(double v) { return format_number(v); }

Outcome majority_ns_convergence() {
  const double target = std::acos(0.8) / std::numbers::pi;
  Outcome o;
  double previous = std::numeric_limits<double>::infinity();
  for (const int n : {11, 101, 501}) {
    const double err = std::abs(sensitivity_exact(AnonymousFunction::threshold(n, 0.0), 0.1) - target);
    o.detail += "n=" + std::to_string(n) + " err=" + num(err) + " ";
    o.pass = o.pass && err < previous;
    previous = err;
  }
  o.pass = o.pass && previous <= 0.05;
  return o;
}

Outcome majority_revenue_convergence() {
  const AllocationRule maj = AnonymousFunction::threshold(1001, 0.0);
  const MechanismParams p = make(1001, 0.1, 0.0);
  const double r = normalized_revenue(revenue(maj, p), p);
  return {std::abs(r - kMaxDensity) <= 0.02, "r=" + num(r) + " target=" + num(kMaxDensity)};
}

Outcome dictator_identity() {
  const DenseFunction d = DenseFunction::tabulate(3, [](std::uint32_t x) { return (x & 1u) ? 1.0 : 0.0; });
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) worst = std::max(worst, std::abs(sensitivity_exact(d, 0.05 * k) - 0.05 * k));
  return {worst <= 1e-12, "max_err=" + num(worst)};
}

Outcome parseval_round_trip() {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> dim(2, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double parseval = 0.0;
  double trip = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const DenseFunction f = DenseFunction::tabulate(dim(rng), [&](std::uint32_t) { return u(rng); });
    const FourierSpectrum s = fourier_transform(f);
    parseval = std::max(parseval, std::abs(s.total_weight() - f.values().squaredNorm() / f.size()));
    trip = std::max(trip, (inverse_fourier(s).values() - f.values()).cwiseAbs().maxCoeff());
  }
  return {parseval <= 1e-10 && trip <= 1e-12, "parseval=" + num(parseval) + " round_trip=" + num(trip)};
}

Outcome revenue_equivalence() {
  const MechanismParams p = make(4, 0.1, 0.0);
  double revenue_err = 0.0;
  double binding = 0.0;
  int high_iir_violations = 0;
  int checked = 0;
  for (std::uint64_t id = 0; id < (1u << 16); ++id) {
    const AllocationRule f = truth_table(id, 4);
    if (!monotonicity_check(std::get<DenseFunction>(f), Monotonicity::kMarginallyMonotone)) continue;
    ++checked;
    const TransferSchedule t = optimal_interim_transfers(f, p);
    revenue_err = std::max(revenue_err, std::abs(t.expected_revenue() - revenue(f, p)));
    const ConstraintReport bn = check_constraints(f, t, p, Constraint::kBnIc);
    const ConstraintReport ir = check_constraints(f, t, p, Constraint::kIir);
    for (const ConstraintRow& row : bn.rows) {
      if (row.constraint == "bn-ic-high") binding = std::max(binding, std::abs(row.slack));
    }
    for (const ConstraintRow& row : ir.rows) {
      if (row.constraint == "iir-low") binding = std::max(binding, std::abs(row.slack));
      if (row.constraint == "iir-high" && !row.pass) ++high_iir_violations;
    }
  }
  Outcome o;
  o.pass = revenue_err <= 1e-10 && binding <= 1e-10 && high_iir_violations == 0;
  o.detail = "functions=" + std::to_string(checked) + " max_transfer_sum_minus_formula=" + num(revenue_err) +
             " max_binding_slack=" + num(binding) + " high_iir_violations=" + std::to_string(high_iir_violations);
  return o;
}

Outcome oracle_check() {
  Outcome o;
  double worst_gap = 0.0;
  std::string where;
  bool sandwich = true;
  for (const double delta : {0.1, 0.25}) {
    for (const double b : {0.0, 0.5}) {
      const MechanismParams p = make(4, delta, b);
      const double r_max = revenue_max_threshold(p).revenue_normalized;
      for (int k = 1; 0.02 * k <= r_max + 1e-12; ++k) {
        const OracleResult res = ns_min_bruteforce(p, 0.02 * k, OracleScope::kAllBoolean);
        sandwich = sandwich && res.feasible_count > 0 && res.min_ns <= res.ltf_ns + 1e-15;
        if (res.ltf_gap > worst_gap) {
          worst_gap = res.ltf_gap;
          where = "delta=" + num(delta) + ",b=" + num(b) + ",r=" + num(0.02 * k);
        }
      }
    }
  }
  const OracleResult two = ns_min_bruteforce(make(2, 0.1, 0.0), 0.25 / (0.8 * std::sqrt(2.0)), OracleScope::kAllBoolean);
  const bool example = two.feasible_count == 1 && two.argmin_functions.size() == 1 &&
                       two.argmin_functions.front() == 8u && std::abs(two.min_ns - 0.095) <= 1e-15;
  o.pass = sandwich && worst_gap <= 0.06 && example;
  o.detail = "sandwich=" + std::string(sandwich ? "ok" : "broken") + " max_gap=" + num(worst_gap) + " at " + where +
             " n2_example=" + (example ? "ok" : "wrong");
  return o;
}

Outcome min_bias_convergence() {
  Outcome o;
  const double target = alpha_limit(0.3);
  double previous = std::numeric_limits<double>::infinity();
  for (const int n : {50, 100, 200, 400}) {
    const double err = std::abs(min_bias_threshold(make(n, 0.1, 0.0), 0.3, Regime::kFinite).mean - target);
    o.detail += "n=" + std::to_string(n) + " err=" + num(err) + " ";
    o.pass = o.pass && err < previous;
    previous = err;
  }
  o.pass = o.pass && previous <= 0.05;
  o.detail += "target=" + num(target) + " b=0";
  return o;
}

Outcome gaussian_kit() {
  double orthant = 0.0;
  double arccos = 0.0;
  for (int k = -9; k <= 9; ++k) {
    const double rho = 0.1 * k;
    const double v = binormal_cdf(0.0, 0.0, rho);
    orthant = std::max(orthant, std::abs(v - (0.25 + std::asin(rho) / (2.0 * std::numbers::pi))));
    arccos = std::max(arccos, std::abs(2.0 * (0.5 - v) - std::acos(rho) / std::numbers::pi));
  }
  return {orthant <= 1e-10 && arccos <= 1e-9, "orthant=" + num(orthant) + " arccos=" + num(arccos)};
}

Outcome asymptotic_frontier() {
  std::vector<double> grid = {1e-4};
  for (int k = 1; k <= 39; ++k) grid.push_back(0.01 * k);
  grid.push_back(kMaxDensity);
  std::vector<std::vector<double>> ns;
  bool endpoints = true;
  for (const double delta : {0.15, 0.25, 0.35}) {
    std::ostringstream csv;
    write_frontier_csv(csv, pareto_frontier(make(1, delta, 0.0), grid, Regime::kAsymptotic));
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    std::vector<double> column;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string cell;
      for (int c = 0; c <= 6; ++c) std::getline(row, cell, ',');
      column.push_back(std::stod(cell));
    }
    endpoints = endpoints && column.size() == grid.size() && column.front() <= 1e-3 &&
                std::abs(column.back() - majority_asymptotics(delta, 1).ns) <= 1e-9;
    ns.push_back(column);
  }
  bool monotone = true;
  for (std::size_t d = 0; d < ns.size(); ++d) {
    for (std::size_t k = 0; k < ns[d].size(); ++k) {
      if (k > 0 && ns[d][k] < ns[d][k - 1]) monotone = false;
      if (d > 0 && ns[d][k] < ns[d - 1][k]) monotone = false;
    }
  }
  return {monotone && endpoints, std::string("monotone=") + (monotone ? "yes" : "no") +
                                     " endpoints=" + (endpoints ? "ok" : "wrong") +
                                     " ns(r->0)=" + num(ns[2].front())};
}

Outcome comparative_statics() {
  std::mt19937_64 rng(3030);
  std::uniform_int_distribution<int> dim(1, 10);
  std::bernoulli_distribution coin(0.5);
  int checked = 0;
  double second = 0.0;
  double gap = 0.0;
  bool nonincreasing = true;
  while (checked < 50) {
    const int n = dim(rng);
    const DenseFunction f = DenseFunction::tabulate(n, [&](std::uint32_t) { return coin(rng) ? 1.0 : 0.0; });
    if (!monotonicity_check(f, Monotonicity::kMarginallyMonotone)) continue;
    ++checked;
    std::vector<double> rev;
    std::vector<double> sur;
    for (int k = 1; k <= 9; ++k) {
      const double delta = 0.05 * k;
      rev.push_back(revenue(f, make(n, delta, 0.3)));
      sur.push_back(surplus(f, make(n, delta, 0.3)));
      const double imperfect = revenue(f, make(n, delta, 0.3, Setting::kImperfectKnowledge));
      gap = std::max(gap, std::abs(imperfect - rev.back() - delta * f.mean()));
    }
    for (std::size_t k = 1; k + 1 < rev.size(); ++k) {
      second = std::max(second, std::abs(rev[k + 1] - 2 * rev[k] + rev[k - 1]));
      second = std::max(second, std::abs(sur[k + 1] - 2 * sur[k] + sur[k - 1]));
    }
    for (std::size_t k = 1; k < rev.size(); ++k) {
      nonincreasing = nonincreasing && rev[k] <= rev[k - 1] + 1e-15 && sur[k] <= sur[k - 1] + 1e-15;
    }
  }
  return {second <= 1e-10 && gap <= 1e-12 && nonincreasing,
          "second_diff=" + num(second) + " imperfect_gap_err=" + num(gap) +
              " nonincreasing=" + (nonincreasing ? "yes" : "no")};
}

bool passes(const AllocationRule& f, const TransferSchedule& t, const MechanismParams& p, bool expost) {
  std::vector<Constraint> which = {Constraint::kBnIc, Constraint::kIir};
  if (expost) {
    which.push_back(Constraint::kDsIc);
    which.push_back(Constraint::kEir);
  }
  for (const Constraint c : which) {
    if (!check_constraints(f, t, p, c).pass()) return false;
  }
  return true;
}

// Mechanisms are (f, t) with t fixed at delta = 0.3: both interim vertices,
// checked on interim constraints, and their ex-post versions on all four.
Outcome noise_monotonicity() {
  int interim_passing = 0;
  int expost_passing = 0;
  int broken = 0;
  const MechanismParams base = make(4, 0.3, 0.0);
  for (std::uint64_t id = 0; id < (1u << 16); ++id) {
    const AllocationRule f = truth_table(id, 4);
    if (!monotonicity_check(std::get<DenseFunction>(f), Monotonicity::kMarginallyMonotone)) continue;
    for (const TransferSchedule& interim : {optimal_interim_transfers(f, base), low_bnic_extreme_transfers(f, base)}) {
      const TransferSchedule full = with_anonymous_expost(interim, f);
      for (const bool expost : {false, true}) {
        const TransferSchedule& t = expost ? full : interim;
        if (!passes(f, t, base, expost)) continue;
        ++(expost ? expost_passing : interim_passing);
        for (const double delta : {0.2, 0.1, 0.05}) {
          if (!passes(f, t, make(4, delta, 0.0), expost)) ++broken;
        }
      }
    }
  }
  return {interim_passing > 0 && broken == 0,
          "interim_mechanisms=" + std::to_string(interim_passing) + " expost_mechanisms=" +
              std::to_string(expost_passing) + " failures_at_lower_delta=" + std::to_string(broken)};
}

Outcome monte_carlo_calibration() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(0.02, 0.48);
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  bool reproducible = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double delta = u(rng);
    AllocationRule f = DenseFunction::constant(1, 0.0);
    if (trial % 2 == 0) {
      const int n = 2 + trial % 9;
      f = DenseFunction::tabulate(n, [&](std::uint32_t) { return coin(rng) ? 1.0 : 0.0; });
    } else {
      const int n = 5 + 37 * trial;
      f = AnonymousFunction::threshold(n, static_cast<double>(trial % 5) - 2.0);
    }
    const std::uint64_t seed = 1000 + trial;
    const MonteCarloEstimate a = sensitivity_monte_carlo(f, delta, 1'000'000, seed);
    const MonteCarloEstimate b = sensitivity_monte_carlo(f, delta, 1'000'000, seed);
    reproducible = reproducible && a.disagreements == b.disagreements && a.estimate == b.estimate;
    const double exact = sensitivity_exact(f, delta);
    const double z = a.std_error > 0.0 ? std::abs(a.estimate - exact) / a.std_error
                                       : (a.estimate == exact ? 0.0 : std::numeric_limits<double>::infinity());
    worst = std::max(worst, z);
  }
  return {worst <= 5.0 && reproducible,
          "max_z=" + num(worst) + " reproducible=" + (reproducible ? "yes" : "no")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 means no runtime bound
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace noisemech

int main() {
  using namespace noisemech;
  const std::vector<Criterion> criteria = {
      {1, "majority noise sensitivity convergence", 30.0, majority_ns_convergence},
      {2, "majority revenue convergence", 5.0, majority_revenue_convergence},
      {3, "dictator identity", 0.0, dictator_identity},
      {4, "parseval and round trip", 0.0, parseval_round_trip},
      {5, "revenue equivalence at n=4", 120.0, revenue_equivalence},
      {6, "threshold oracle gap", 300.0, oracle_check},
      {7, "minimum bias convergence", 0.0, min_bias_convergence},
      {8, "gaussian kit", 0.0, gaussian_kit},
      {9, "asymptotic frontier", 10.0, asymptotic_frontier},
      {10, "linearity in delta", 0.0, comparative_statics},
      {11, "noise reduction keeps implementability", 0.0, noise_monotonicity},
      {12, "monte carlo calibration", 0.0, monte_carlo_calibration},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      o.pass = false;
      o.detail += " over time budget";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%s; %.2fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

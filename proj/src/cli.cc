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

#include "noisemech/cli.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "noisemech/binomial.h"
#include "noisemech/format.h"
#include "noisemech/function_spec.h"
#include "noisemech/gaussian.h"
#include "noisemech/hypercube.h"
#include "noisemech/noise.h"

namespace noisemech::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kDefaultSamples = 1'000'000;
constexpr double kOracleGapBound = 0.06;
constexpr double kOracleGridStep = 0.02;

std::string fmt(double v) { return format_number(v); }

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("cannot parse '" + text + "' in " + what);
  }
  if (used != text.size()) throw UsageError("cannot parse '" + text + "' in " + what);
  return value;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

void require_open_delta(double delta) {
  require(delta > 0.0 && delta < 0.5, "delta must be in (0, 0.5)");
}

// Enumerates every Boolean rule on n <= 4 points as a DenseFunction.
DenseFunction truth_table(std::uint64_t id, int n) {
  return DenseFunction::tabulate(
      n, [id](std::uint32_t x) { return static_cast<double>((id >> x) & 1u); });
}

class Output {
 public:
  Output(const std::optional<std::string>& path, std::ostream& fallback) : stream_(&fallback) {
    if (path) {
      file_.open(*path);
      if (!file_) throw std::runtime_error("cannot open output file " + *path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  void finish(const std::optional<std::string>& path) {
    stream_->flush();
    if (path && !file_) throw std::runtime_error("write failed for " + *path);
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// ---------------------------------------------------------------- analyze

double anonymous_influence(const AnonymousFunction& f) {
  const Eigen::VectorXd w = binomial_half_pmf(f.n() - 1);
  double total = 0.0;
  for (int k = 0; k < f.n(); ++k) {
    const double d = (f[k + 1] - f[k]) / 2.0;
    total += w[k] * d * d;
  }
  return total;
}

int run_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const AllocationRule f = load_function(*config.spec_path);
  MechanismParams params = config.params;
  params.n = dimension(f);
  const bool boolean = is_boolean(f);
  const bool unit = std::visit([](const auto& h) { return h.is_unit_range(); }, f);

  out << "key,value\n";
  out << "kind," << (std::holds_alternative<DenseFunction>(f) ? "dense" : "anonymous") << '\n';
  out << "n," << params.n << '\n';
  const LowDegreeSummary s = low_degree_summary(f);
  out << "mean," << fmt(s.mean) << '\n';
  out << "boolean," << (boolean ? "true" : "false") << '\n';

  bool marginal = false;
  if (unit) {
    const bool monotone = std::visit(
        [](const auto& h) { return monotonicity_check(h, Monotonicity::kMonotone); }, f);
    marginal = std::visit(
        [](const auto& h) { return monotonicity_check(h, Monotonicity::kMarginallyMonotone); },
        f);
    out << "monotone," << (monotone ? "true" : "false") << '\n';
    out << "marginally_monotone," << (marginal ? "true" : "false") << '\n';
  }
  out << "level_one_sum," << fmt(s.level_one_sum) << '\n';

  if (const auto* dense = std::get_if<DenseFunction>(&f)) {
    const FourierSpectrum spectrum = fourier_transform(*dense);
    std::vector<double> weight(params.n + 1, 0.0);
    for (std::uint32_t set = 0; set < spectrum.coeffs().size(); ++set) {
      weight[std::popcount(set)] += spectrum[set] * spectrum[set];
    }
    for (int d = 0; d <= params.n; ++d) out << "fourier_weight_" << d << ',' << fmt(weight[d]) << '\n';
    for (int i = 0; i < params.n; ++i) out << "influence_" << i << ',' << fmt(influence(spectrum, i)) << '\n';
  } else {
    out << "influence_each," << fmt(anonymous_influence(std::get<AnonymousFunction>(f))) << '\n';
  }

  if (!marginal) {
    err << "warning: rule is not marginally monotone; revenue formulas evaluated anyway\n";
  }
  MechanismParams noisy = params;
  noisy.setting = Setting::kNoisyReport;
  MechanismParams imperfect = params;
  imperfect.setting = Setting::kImperfectKnowledge;
  out << "revenue_noisy_report," << fmt(revenue(s, noisy)) << '\n';
  out << "revenue_imperfect_knowledge," << fmt(revenue(s, imperfect)) << '\n';
  out << "surplus," << fmt(surplus(s, params)) << '\n';

  if (!boolean) {
    err << "note: noise sensitivity is reported for {0,1}-valued rules only\n";
    return kExitOk;
  }
  const bool exact_possible = std::holds_alternative<DenseFunction>(f) ||
                              params.n <= kMaxJointCountDimension;
  std::uint64_t samples = config.samples;
  if (exact_possible) {
    const double ns = sensitivity_exact(f, params.delta);
    out << "ns_exact," << fmt(ns) << '\n';
    const double n = params.n;
    out << "surplus_distortion_bound,"
        << fmt(std::sqrt(params.b * params.b * n * n + n) / 2.0 * std::sqrt(ns)) << '\n';
  } else {
    err << "warning: n=" << params.n << " exceeds the exact limit "
        << kMaxJointCountDimension << "; using Monte Carlo\n";
    if (samples == 0) samples = kDefaultSamples;
  }
  if (samples > 0) {
    const MonteCarloEstimate mc = sensitivity_monte_carlo(f, params.delta, samples, config.seed);
    out << "ns_mc," << fmt(mc.estimate) << '\n';
    out << "ns_mc_std_error," << fmt(mc.std_error) << '\n';
    out << "ns_mc_samples," << mc.samples << '\n';
  }
  return kExitOk;
}

// -------------------------------------------------------------- transfers

int run_transfers(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const AllocationRule f = load_function(*config.spec_path);
  MechanismParams params = config.params;
  params.n = dimension(f);
  TransferSchedule schedule;
  try {
    schedule = optimal_interim_transfers(f, params);
  } catch (const std::invalid_argument& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitFailed;
  }
  schedule = with_anonymous_expost(schedule, f);

  ConstraintReport report;
  for (const Constraint c : {Constraint::kBnIc, Constraint::kIir, Constraint::kDsIc, Constraint::kEir}) {
    report.append(check_constraints(f, schedule, params, c));
  }

  out << "agent,t_minus,t_plus\n";
  const int agents = std::holds_alternative<AnonymousFunction>(f) ? 1 : params.n;
  for (int i = 0; i < agents; ++i) {
    out << i << ',' << fmt(schedule.interim[i].v_minus) << ',' << fmt(schedule.interim[i].v_plus) << '\n';
  }
  out << '\n' << "agent,m,t\n";
  for (int i = 0; i < static_cast<int>(schedule.anonymous_expost.size()); ++i) {
    const Eigen::VectorXd& t = schedule.anonymous_expost[i];
    for (Eigen::Index m = 0; m < t.size(); ++m) out << i << ',' << m << ',' << fmt(t[m]) << '\n';
  }
  out << '\n' << "expected_revenue," << fmt(schedule.expected_revenue()) << '\n';
  out << "revenue_formula," << fmt(revenue(f, params)) << '\n';

  Output report_out(config.out_path, out);
  if (!config.out_path) report_out.get() << '\n';
  write_csv(report_out.get(), report);
  report_out.finish(config.out_path);
  if (!report.pass()) err << "note: some constraints fail for the minimum-norm ex-post transfers\n";
  return kExitOk;
}

// --------------------------------------------------------------- optimize

void write_point_row(std::ostream& out, const FrontierPoint& p) {
  out << "regime,n,delta,b,r,threshold,ns,surplus_per_capita,revenue_normalized,mean,"
         "boundary_weight,threshold_alternate,ns_alternate\n";
  out << to_string(p.regime) << ',' << (p.regime == Regime::kAsymptotic ? std::string("inf") : std::to_string(p.n))
      << ',' << fmt(p.delta) << ',' << fmt(p.b) << ',' << fmt(p.r) << ',' << fmt(p.threshold) << ','
      << fmt(p.ns) << ',' << fmt(p.surplus_per_capita) << ',' << fmt(p.revenue_normalized) << ','
      << fmt(p.mean) << ',' << fmt(p.boundary_weight) << ',' << fmt(p.threshold_alternate) << ','
      << fmt(p.ns_alternate) << '\n';
}

int run_optimize(const RunConfig& config, std::ostream& out, std::ostream& err) {
  MechanismParams params = config.params;
  if (config.n) params.n = *config.n;
  Output output(config.out_path, out);
  std::ostream& os = output.get();
  int status = kExitOk;
  switch (config.mode) {
    case OptimizeMode::kRevenueMax: {
      const RevenueMaxResult res = revenue_max_threshold(params);
      os << "tau_paper,tau_pointwise,finite_opt,revenue,revenue_normalized\n";
      os << fmt(res.tau_paper.value_or(kNaN)) << ',' << fmt(res.tau_pointwise) << ','
         << res.finite_opt << ',' << fmt(res.revenue) << ',' << fmt(res.revenue_normalized) << '\n';
      if (!res.note.empty()) err << "note: " << res.note << '\n';
      break;
    }
    case OptimizeMode::kSurplusMax:
    case OptimizeMode::kMinBias: {
      try {
        const FrontierPoint p = config.mode == OptimizeMode::kSurplusMax
                                    ? surplus_max_threshold(params, *config.r, config.regime)
                                    : min_bias_threshold(params, *config.r, config.regime);
        if (config.regime == Regime::kFinite && params.n > kMaxJointCountDimension) {
          err << "warning: ns not computed exactly for n > " << kMaxJointCountDimension << '\n';
        }
        write_point_row(os, p);
      } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        status = kExitFailed;
      }
      break;
    }
    case OptimizeMode::kNsMin: {
      const OracleResult res = ns_min_bruteforce(params, *config.r, config.scope);
      os << "min_ns,feasible_count,argmin_count,argmin,ltf_threshold,ltf_ns,ltf_gap\n";
      std::string ids;
      for (std::size_t k = 0; k < res.argmin_functions.size(); ++k) {
        if (k > 0) ids += ';';
        ids += std::to_string(res.argmin_functions[k]);
      }
      os << fmt(res.min_ns) << ',' << res.feasible_count << ',' << res.argmin_functions.size()
         << ',' << ids << ',' << (res.feasible_count > 0 ? std::to_string(res.ltf_threshold) : "nan")
         << ',' << fmt(res.feasible_count > 0 ? res.ltf_ns : kNaN) << ',' << fmt(res.ltf_gap) << '\n';
      if (res.feasible_count == 0) {
        err << "infeasible: no marginally monotone rule reaches r=" << fmt(*config.r) << '\n';
        status = kExitFailed;
      }
      break;
    }
  }
  output.finish(config.out_path);
  return status;
}

// --------------------------------------------------------------- frontier

int run_frontier(const RunConfig& config, std::ostream& out, std::ostream& err) {
  MechanismParams params = config.params;
  if (config.n) params.n = *config.n;
  const std::vector<FrontierPoint> points = pareto_frontier(params, config.r_grid, config.regime);
  for (const FrontierPoint& p : points) {
    if (!p.feasible) err << "note: r=" << fmt(p.r) << " is not reachable at n=" << p.n << '\n';
  }
  Output output(config.out_path, out);
  write_frontier_csv(output.get(), points);
  output.finish(config.out_path);
  return kExitOk;
}

// --------------------------------------------------------- majority-curve

int run_majority_curve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<FrontierPoint> points;
  const double b = config.params.b;
  if (!config.n) {
    points = majority_curve_asymptotic(b, config.delta_grid);
  } else if (*config.n <= kMaxJointCountDimension) {
    points = majority_curve(*config.n, b, config.delta_grid);
  } else {
    const int n = *config.n;
    err << "warning: n=" << n << " exceeds the exact limit " << kMaxJointCountDimension
        << "; noise sensitivity by Monte Carlo\n";
    const std::uint64_t samples = config.samples > 0 ? config.samples : kDefaultSamples;
    const AnonymousFunction maj = AnonymousFunction::count_threshold(n, (n + 1) / 2);
    for (const double delta : config.delta_grid) {
      // Revenue and surplus stay exact; only the ns column is sampled.
      FrontierPoint p = majority_curve(1, b, {delta}).front();
      const ThresholdTable table = threshold_table(n, delta, false);
      const int cut = (n + 1) / 2;
      const double rho = 1.0 - 2.0 * delta;
      const double root_n = std::sqrt(static_cast<double>(n));
      const double rev = rho * table.first[cut] + (b - 1.0) / 2.0 * table.mean[cut];
      p.n = n;
      p.r = rev / root_n;
      p.threshold = table.nu(cut);
      p.ns = sensitivity_monte_carlo(maj, delta, samples, config.seed).estimate;
      p.surplus_per_capita = b / 2.0 * table.mean[cut] + rho / 2.0 * table.first[cut] / n;
      p.revenue_normalized = rho > 0.0 ? rev / (rho * root_n) : kNaN;
      p.mean = table.mean[cut];
      points.push_back(p);
    }
  }
  Output output(config.out_path, out);
  write_frontier_csv(output.get(), points);
  output.finish(config.out_path);
  return kExitOk;
}

// ----------------------------------------------------------------- verify

constexpr int kVerifyDimension = 4;

bool verify_oracle(const RunConfig& config, std::ostream& os, std::ostream& err) {
  MechanismParams params = config.params;
  params.n = kVerifyDimension;
  const double r_max = revenue_max_threshold(params).revenue_normalized;
  os << "suite,oracle-n4\n";
  os << "r,feasible_count,min_ns,ltf_threshold,ltf_ns,ltf_gap,argmin_count\n";
  // The sandwich min_ns <= ltf_ns is what must hold; the gap itself is only
  // reported since the optimality of thresholds is an n -> inf statement.
  bool ok = true;
  double max_gap = 0.0;
  for (int k = 1; k * kOracleGridStep <= r_max + 1e-12; ++k) {
    const double r = k * kOracleGridStep;
    const OracleResult res = ns_min_bruteforce(params, r, OracleScope::kAllBoolean);
    os << fmt(r) << ',' << res.feasible_count << ',' << fmt(res.min_ns) << ',' << res.ltf_threshold
       << ',' << fmt(res.ltf_ns) << ',' << fmt(res.ltf_gap) << ',' << res.argmin_functions.size()
       << '\n';
    ok = ok && res.feasible_count > 0 && res.ltf_gap >= -1e-12;
    max_gap = std::max(max_gap, res.ltf_gap);
  }
  os << "max_ltf_gap," << fmt(max_gap) << '\n';
  if (max_gap > kOracleGapBound) {
    err << "note: threshold gap " << fmt(max_gap) << " exceeds " << fmt(kOracleGapBound)
        << " at n=" << kVerifyDimension << '\n';
  }
  os << "oracle-n4," << (ok ? "pass" : "fail") << "\n\n";
  return ok;
}

bool verify_revenue_equivalence(const RunConfig& config, std::ostream& os) {
  MechanismParams params = config.params;
  params.n = kVerifyDimension;
  const std::uint64_t count = std::uint64_t{1} << (1u << kVerifyDimension);
  std::uint64_t checked = 0;
  std::uint64_t high_iir_violations = 0;
  double max_revenue_error = 0.0;
  // Summing the per-agent transfers charges the E[f] term once per agent;
  // the closed form charges it once. Track what is left after that term.
  double max_residual = 0.0;
  double per_agent = (params.b - 1.0) / 2.0;
  if (params.setting == Setting::kImperfectKnowledge) per_agent += params.delta;
  double max_binding_slack = 0.0;
  for (std::uint64_t id = 0; id < count; ++id) {
    const AllocationRule f = truth_table(id, kVerifyDimension);
    if (!monotonicity_check(std::get<DenseFunction>(f), Monotonicity::kMarginallyMonotone)) continue;
    ++checked;
    const TransferSchedule t = optimal_interim_transfers(f, params);
    const double error = t.expected_revenue() - revenue(f, params);
    max_revenue_error = std::max(max_revenue_error, std::abs(error));
    const double extra = (kVerifyDimension - 1) * per_agent * low_degree_summary(f).mean;
    max_residual = std::max(max_residual, std::abs(error - extra));
    const ConstraintReport bn = check_constraints(f, t, params, Constraint::kBnIc);
    const ConstraintReport ir = check_constraints(f, t, params, Constraint::kIir);
    for (const ConstraintRow& row : bn.rows) {
      if (row.constraint == "bn-ic-high") max_binding_slack = std::max(max_binding_slack, std::abs(row.slack));
    }
    for (const ConstraintRow& row : ir.rows) {
      if (row.constraint == "iir-low") max_binding_slack = std::max(max_binding_slack, std::abs(row.slack));
      if (row.constraint == "iir-high" && !row.pass) ++high_iir_violations;
    }
  }
  const bool ok = checked > 0 && max_revenue_error <= 1e-10 && max_binding_slack <= 1e-10 &&
                  high_iir_violations == 0;
  os << "suite,revenue-equivalence\n";
  os << "functions_checked,max_revenue_error,max_residual_per_agent_term,max_binding_slack,"
        "high_iir_violations\n";
  os << checked << ',' << fmt(max_revenue_error) << ',' << fmt(max_residual) << ','
     << fmt(max_binding_slack) << ','
     << high_iir_violations << '\n';
  os << "revenue-equivalence," << (ok ? "pass" : "fail") << "\n\n";
  return ok;
}

bool verify_extreme_point(const RunConfig& config, std::ostream& os) {
  MechanismParams params = config.params;
  params.n = kVerifyDimension;
  const std::uint64_t count = std::uint64_t{1} << (1u << kVerifyDimension);
  std::uint64_t checked = 0;
  std::uint64_t infeasible_alternatives = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  double max_formula_error = 0.0;
  for (std::uint64_t id = 0; id < count; ++id) {
    const AllocationRule f = truth_table(id, kVerifyDimension);
    if (!monotonicity_check(std::get<DenseFunction>(f), Monotonicity::kMarginallyMonotone)) continue;
    ++checked;
    const TransferSchedule best = optimal_interim_transfers(f, params);
    const TransferSchedule other = low_bnic_extreme_transfers(f, params);
    ConstraintReport report = check_constraints(f, other, params, Constraint::kBnIc);
    report.append(check_constraints(f, other, params, Constraint::kIir));
    if (!report.pass()) ++infeasible_alternatives;
    const double gap = best.expected_revenue() - other.expected_revenue();
    double predicted = 0.0;
    for (const InterimPair& p : interim_marginals(f, params)) {
      predicted += (0.5 - params.delta) * (p.v_plus - p.v_minus);
    }
    min_gap = std::min(min_gap, gap);
    max_formula_error = std::max(max_formula_error, std::abs(gap - predicted));
  }
  const bool ok = checked > 0 && min_gap >= -1e-12 && max_formula_error <= 1e-10 &&
                  infeasible_alternatives == 0;
  os << "suite,extreme-point\n";
  os << "functions_checked,min_revenue_gap,max_gap_formula_error,infeasible_alternatives\n";
  os << checked << ',' << fmt(min_gap) << ',' << fmt(max_formula_error) << ','
     << infeasible_alternatives << '\n';
  os << "extreme-point," << (ok ? "pass" : "fail") << "\n\n";
  return ok;
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Output output(config.out_path, out);
  std::ostream& os = output.get();
  const bool all = config.suite == "all";
  bool ok = true;
  if (all || config.suite == "oracle-n4") ok = verify_oracle(config, os, err) && ok;
  if (all || config.suite == "revenue-equivalence") ok = verify_revenue_equivalence(config, os) && ok;
  if (all || config.suite == "extreme-point") ok = verify_extreme_point(config, os) && ok;
  os << "summary," << (ok ? "pass" : "fail") << '\n';
  output.finish(config.out_path);
  if (!ok) err << "verification failed\n";
  return ok ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------- privacy

int run_privacy(const RunConfig& config, std::ostream& out) {
  Output output(config.out_path, out);
  std::ostream& os = output.get();
  os << "eps,delta\n";
  if (config.eps) {
    os << fmt(*config.eps) << ',' << fmt(eps_to_delta(*config.eps)) << '\n';
  } else {
    os << fmt(delta_to_eps(config.params.delta)) << ',' << fmt(config.params.delta) << '\n';
  }
  output.finish(config.out_path);
  return kExitOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    require(parts.size() == 3, "grid must be start:stop:step, got '" + text + "'");
    const double start = parse_real(parts[0], "grid");
    const double stop = parse_real(parts[1], "grid");
    const double step = parse_real(parts[2], "grid");
    require(step > 0.0, "grid step must be > 0");
    require(stop >= start - 1e-12, "grid stop must not be below start");
    for (long k = 0;; ++k) {
      double v = start + static_cast<double>(k) * step;
      if (v > stop + 1e-12) break;
      if (std::abs(v - stop) <= 1e-12) v = stop;
      values.push_back(v);
      require(values.size() <= 10'000'000, "grid too long");
    }
    return values;
  }
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) values.push_back(parse_real(part, "grid"));
  require(!values.empty(), "empty grid");
  return values;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  if (args.empty()) throw UsageError("missing command");

  CLI::App app{"noisemech: revenue, surplus and noise sensitivity of public-good rules"};
  app.require_subcommand(1, 1);

  struct Raw {
    double delta = 0.0;
    double b = 0.0;
    std::string n;
    std::string setting = "noisy-report";
    std::string spec;
    std::string out;
    double r = 0.0;
    std::string r_grid;
    std::string delta_grid;
    std::string regime = "finite";
    std::string mode;
    std::string scope = "anonymous";
    std::string suite;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    double eps = 0.0;
  } raw;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--b", raw.b, "preference bias in [0, 1] (default 0)");
    sub->add_option("--setting", raw.setting, "noisy-report | imperfect-knowledge");
    sub->add_option("--out", raw.out, "output file (default stdout)");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "statistics of one allocation rule");
  analyze->add_option("--spec", raw.spec, "function spec file")->required();
  analyze->add_option("--delta", raw.delta, "flip probability in (0, 0.5)")->required();
  analyze->add_option("--samples", raw.samples, "Monte Carlo samples (0 = exact only)");
  analyze->add_option("--seed", raw.seed, "Monte Carlo seed");
  add_common(analyze);

  CLI::App* transfers = app.add_subcommand("transfers", "optimal transfers and constraint report");
  transfers->add_option("--spec", raw.spec, "function spec file")->required();
  transfers->add_option("--delta", raw.delta, "flip probability in (0, 0.5)")->required();
  add_common(transfers);

  CLI::App* optimize = app.add_subcommand("optimize", "threshold optimizers and oracles");
  optimize->add_option("--mode", raw.mode, "revenue-max | surplus-max | min-bias | ns-min")->required();
  optimize->add_option("--n", raw.n, "agent count");
  optimize->add_option("--delta", raw.delta, "flip probability")->required();
  optimize->add_option("--r", raw.r, "normalized revenue target");
  optimize->add_option("--regime", raw.regime, "finite | asymptotic");
  optimize->add_option("--scope", raw.scope, "all-boolean | anonymous (ns-min)");
  add_common(optimize);

  CLI::App* frontier = app.add_subcommand("frontier", "revenue / noise sensitivity frontier CSV");
  frontier->add_option("--delta", raw.delta, "flip probability in (0, 0.5)")->required();
  frontier->add_option("--r-grid", raw.r_grid, "start:stop:step or comma list")->required();
  frontier->add_option("--regime", raw.regime, "finite | asymptotic");
  frontier->add_option("--n", raw.n, "agent count (finite regime)");
  add_common(frontier);

  CLI::App* majority = app.add_subcommand("majority-curve", "majority rule across delta");
  majority->add_option("--n", raw.n, "agent count, or inf for the limit (default inf)");
  majority->add_option("--delta-grid", raw.delta_grid, "start:stop:step or comma list")->required();
  majority->add_option("--samples", raw.samples, "Monte Carlo samples for n > 2000");
  majority->add_option("--seed", raw.seed, "Monte Carlo seed");
  add_common(majority);

  CLI::App* verify = app.add_subcommand("verify", "oracle suites");
  verify->add_option("--suite", raw.suite, "oracle-n4 | revenue-equivalence | extreme-point | all")
      ->required();
  verify->add_option("--delta", raw.delta, "flip probability in (0, 0.5) (default 0.1)");
  add_common(verify);

  CLI::App* privacy = app.add_subcommand("privacy", "eps <-> delta for randomized response");
  privacy->add_option("--eps", raw.eps, "privacy level eps > 0");
  privacy->add_option("--delta", raw.delta, "flip probability in (0, 0.5)");
  privacy->add_option("--out", raw.out, "output file (default stdout)");

  RunConfig config;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    config.command = "help";
    config.help_text = app.help();
    return config;
  } catch (const CLI::CallForAllHelp&) {
    config.command = "help";
    config.help_text = app.help("", CLI::AppFormatMode::All);
    return config;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  const auto given = [sub](const std::string& flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };

  config.params.b = raw.b;
  require(raw.b >= 0.0 && raw.b <= 1.0, "b must be in [0, 1]");
  if (raw.setting == "noisy-report") {
    config.params.setting = Setting::kNoisyReport;
  } else if (raw.setting == "imperfect-knowledge") {
    config.params.setting = Setting::kImperfectKnowledge;
  } else {
    throw UsageError("setting must be noisy-report or imperfect-knowledge");
  }
  if (given("--out")) config.out_path = raw.out;
  if (given("--spec")) config.spec_path = raw.spec;
  config.samples = raw.samples;
  config.seed = raw.seed;
  config.has_delta = given("--delta");
  config.params.delta = config.has_delta ? raw.delta : 0.1;

  if (given("--n") && raw.n != "inf") {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(raw.n, &used);
      require(used == raw.n.size(), "");
    } catch (const std::exception&) {
      throw UsageError("n must be a positive integer, got '" + raw.n + "'");
    }
    require(n >= 1, "n must be >= 1");
    config.n = n;
    config.params.n = n;
  }
  if (given("--regime")) {
    require(raw.regime == "finite" || raw.regime == "asymptotic",
            "regime must be finite or asymptotic");
  }
  config.regime = raw.regime == "asymptotic" ? Regime::kAsymptotic : Regime::kFinite;

  const std::string& cmd = config.command;
  if (cmd == "analyze" || cmd == "transfers" || cmd == "frontier" || cmd == "verify") {
    require_open_delta(config.params.delta);
  }
  if (cmd == "frontier") {
    config.r_grid = parse_grid(raw.r_grid);
    for (const double r : config.r_grid) {
      require(r > 0.0 && r <= kMaxDensity * (1.0 + 1e-12), "r must be in (0, 1/sqrt(2 pi)]");
    }
    require(config.regime == Regime::kAsymptotic || config.n.has_value(),
            "--n is required for the finite regime");
  }
  if (cmd == "optimize") {
    if (raw.mode == "revenue-max") {
      config.mode = OptimizeMode::kRevenueMax;
      require(config.params.delta >= 0.0 && config.params.delta < 0.5,
              "delta must be in [0, 0.5) for revenue-max");
      require(config.n.has_value(), "--n is required for revenue-max");
    } else {
      if (raw.mode == "surplus-max") {
        config.mode = OptimizeMode::kSurplusMax;
      } else if (raw.mode == "min-bias") {
        config.mode = OptimizeMode::kMinBias;
      } else if (raw.mode == "ns-min") {
        config.mode = OptimizeMode::kNsMin;
      } else {
        throw UsageError("mode must be revenue-max, surplus-max, min-bias or ns-min");
      }
      require_open_delta(config.params.delta);
      require(given("--r"), "--r is required for mode " + raw.mode);
      config.r = raw.r;
      if (config.mode == OptimizeMode::kNsMin) {
        require(raw.r >= 0.0, "r must be >= 0");
        require(config.n.has_value(), "--n is required for ns-min");
        if (raw.scope == "all-boolean") {
          config.scope = OracleScope::kAllBoolean;
          require(*config.n <= kMaxOracleDenseDimension, "all-boolean scope needs n <= 4");
        } else if (raw.scope == "anonymous") {
          config.scope = OracleScope::kAnonymous;
          require(*config.n <= kMaxOracleAnonymousDimension, "anonymous scope needs n <= 20");
        } else {
          throw UsageError("scope must be all-boolean or anonymous");
        }
      } else {
        require(raw.r > 0.0 && raw.r <= kMaxDensity * (1.0 + 1e-12),
                "r must be in (0, 1/sqrt(2 pi)]");
        require(config.regime == Regime::kAsymptotic || config.n.has_value(),
                "--n is required for the finite regime");
      }
    }
  }
  if (cmd == "majority-curve") {
    config.delta_grid = parse_grid(raw.delta_grid);
    for (const double d : config.delta_grid) {
      require(d >= 0.0 && d <= 0.5, "delta-grid values must be in [0, 0.5]");
    }
  }
  if (cmd == "verify") {
    require(raw.suite == "oracle-n4" || raw.suite == "revenue-equivalence" ||
                raw.suite == "extreme-point" || raw.suite == "all",
            "suite must be oracle-n4, revenue-equivalence, extreme-point or all");
    config.suite = raw.suite;
  }
  if (cmd == "privacy") {
    require(given("--eps") != config.has_delta, "privacy needs exactly one of --eps, --delta");
    if (given("--eps")) {
      require(raw.eps > 0.0, "eps must be > 0");
      config.eps = raw.eps;
    } else {
      require_open_delta(config.params.delta);
    }
  }
  return config;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command == "help") {
      out << config.help_text;
      return kExitOk;
    }
    if (config.command == "analyze") return run_analyze(config, out, err);
    if (config.command == "transfers") return run_transfers(config, out, err);
    if (config.command == "optimize") return run_optimize(config, out, err);
    if (config.command == "frontier") return run_frontier(config, out, err);
    if (config.command == "majority-curve") return run_majority_curve(config, out, err);
    if (config.command == "verify") return run_verify(config, out, err);
    if (config.command == "privacy") return run_privacy(config, out);
    err << "error: unknown command '" << config.command << "'\n";
    return kExitUsage;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(config, out, err);
}

}  // namespace noisemech::cli

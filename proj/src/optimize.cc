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

#include "noisemech/optimize.h"

#include <bit>
#include <cmath>
#include <limits>

#include "noisemech/binomial.h"
#include "noisemech/format.h"
#include "noisemech/gaussian.h"
#include "noisemech/noise.h"
#include "noisemech/parallel.h"

namespace noisemech {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_target(double r) {
  if (!(r > 0.0 && r <= kMaxDensity * (1.0 + 1e-12))) {
    throw std::invalid_argument("r must be in (0, 1/sqrt(2 pi)], got " + format_number(r));
  }
}

double revenue_coefficient(const MechanismParams& params) {
  double coeff = (params.b - 1.0) / 2.0;
  if (params.setting == Setting::kImperfectKnowledge) coeff += params.delta;
  return coeff;
}

double revenue_from_moments(double mean, double first, const MechanismParams& params) {
  return (1.0 - 2.0 * params.delta) * first + revenue_coefficient(params) * mean;
}

bool meets_target(double revenue_norm, double r) {
  return revenue_norm >= r - kFeasibilityTolerance;
}

// Cuts meeting r form an interval because the per-cell revenue changes sign
// once; lo and hi are its ends, or -1 when empty.
struct FeasibleRange {
  int lo = -1;
  int hi = -1;
  bool empty() const { return lo < 0; }
};

FeasibleRange feasible_cuts(const ThresholdTable& table, const MechanismParams& params,
                            double r) {
  FeasibleRange range;
  for (int cut = 0; cut <= table.n + 1; ++cut) {
    const double rn = normalized_revenue(threshold_revenue(table, params, cut), params);
    if (meets_target(rn, r)) {
      if (range.lo < 0) range.lo = cut;
      range.hi = cut;
    }
  }
  return range;
}

double table_ns(const ThresholdTable& table, int cut) {
  return table.ns.size() > 0 ? table.ns[cut] : kNaN;
}

FrontierPoint finite_point(const ThresholdTable& table, const MechanismParams& params,
                           double r, int cut) {
  FrontierPoint p;
  p.regime = Regime::kFinite;
  p.n = table.n;
  p.delta = params.delta;
  p.b = params.b;
  p.r = r;
  p.threshold = table.nu(cut);
  p.ns = table_ns(table, cut);
  p.surplus_per_capita = threshold_surplus(table, params, cut) / table.n;
  p.revenue_normalized = normalized_revenue(threshold_revenue(table, params, cut), params);
  p.mean = table.mean[cut];
  return p;
}

FrontierPoint infeasible_point(const MechanismParams& params, double r) {
  FrontierPoint p;
  p.regime = Regime::kFinite;
  p.n = params.n;
  p.delta = params.delta;
  p.b = params.b;
  p.r = r;
  p.threshold = p.ns = p.surplus_per_capita = p.revenue_normalized = kNaN;
  p.mean = p.boundary_weight = p.threshold_alternate = p.ns_alternate = kNaN;
  p.feasible = false;
  return p;
}

FrontierPoint asymptotic_point(const MechanismParams& params, double r, double threshold) {
  FrontierPoint p;
  p.regime = Regime::kAsymptotic;
  p.n = 0;
  p.delta = params.delta;
  p.b = params.b;
  p.r = r;
  p.threshold = threshold;
  p.ns = ltf_ns_asymptotic(r, params.delta);
  p.mean = normal_ccdf(threshold);
  // The level-one part of surplus is O(1/sqrt(n)) per capita.
  p.surplus_per_capita = params.b / 2.0 * p.mean;
  p.revenue_normalized = r;
  p.threshold_alternate = -threshold;
  p.ns_alternate = p.ns;
  return p;
}

bool boolean_marginally_monotone_dense(std::uint64_t id, int n, double* mean,
                                       double* level_one_sum) {
  const int size = 1 << n;
  std::int64_t ones = 0;
  std::int64_t total = 0;
  bool monotone = true;
  for (int i = 0; i < n; ++i) {
    std::int64_t sum = 0;
    for (int x = 0; x < size; ++x) {
      if ((id >> x) & 1u) sum += ((x >> i) & 1) ? 1 : -1;
    }
    if (sum < 0) monotone = false;
    total += sum;
  }
  for (int x = 0; x < size; ++x) ones += (id >> x) & 1u;
  *mean = static_cast<double>(ones) / size;
  *level_one_sum = static_cast<double>(total) / size;
  return monotone;
}

}  // namespace

const char* to_string(Regime regime) {
  return regime == Regime::kFinite ? "finite" : "asymptotic";
}

ThresholdTable threshold_table(int n, double delta, bool with_ns) {
  if (n < 1 || n > kMaxAnonymousDimension) {
    throw std::invalid_argument("threshold table needs 1 <= n <= " +
                                std::to_string(kMaxAnonymousDimension));
  }
  ThresholdTable table;
  table.n = n;
  table.delta = delta;
  const Eigen::VectorXd w = binomial_half_pmf(n);
  table.mean = Eigen::VectorXd::Zero(n + 2);
  table.first = Eigen::VectorXd::Zero(n + 2);
  for (int cut = n; cut >= 0; --cut) {
    table.mean[cut] = table.mean[cut + 1] + w[cut];
    table.first[cut] = table.first[cut + 1] + w[cut] * (2.0 * cut - n);
  }
  if (with_ns) table.ns = threshold_sensitivities(joint_count_distribution(n, delta));
  return table;
}

double threshold_revenue(const ThresholdTable& table, const MechanismParams& params, int cut) {
  return revenue_from_moments(table.mean[cut], table.first[cut], params);
}

double threshold_surplus(const ThresholdTable& table, const MechanismParams& params, int cut) {
  return params.b * table.n / 2.0 * table.mean[cut] +
         (1.0 - 2.0 * params.delta) / 2.0 * table.first[cut];
}

double normalized_revenue(double revenue, const MechanismParams& params) {
  return revenue / ((1.0 - 2.0 * params.delta) * std::sqrt(static_cast<double>(params.n)));
}

RevenueMaxResult revenue_max_threshold(const MechanismParams& params) {
  if (params.n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(params.delta >= 0.0 && params.delta < 0.5)) {
    throw std::invalid_argument("delta must be in [0, 0.5)");
  }
  if (!(params.b >= 0.0 && params.b <= 1.0)) {
    throw std::invalid_argument("b must be in [0, 1]");
  }
  RevenueMaxResult result;
  const double rho = 1.0 - 2.0 * params.delta;
  if (params.b < 1.0) {
    result.tau_paper = 2.0 / ((1.0 - params.b) * rho);
  } else {
    result.note = "tau_paper undefined for b = 1";
  }
  result.tau_pointwise = (1.0 - params.b) / (2.0 * rho);

  const ThresholdTable table = threshold_table(params.n, params.delta, false);
  int best = params.n;
  double best_revenue = threshold_revenue(table, params, best);
  for (int cut = params.n - 1; cut >= 0; --cut) {
    const double value = threshold_revenue(table, params, cut);
    if (value >= best_revenue) {
      best = cut;
      best_revenue = value;
    }
  }
  result.finite_opt = table.nu(best);
  result.revenue = best_revenue;
  result.revenue_normalized = best_revenue / (rho * std::sqrt(static_cast<double>(params.n)));
  return result;
}

FrontierPoint surplus_max_threshold(const MechanismParams& params, double r, Regime regime) {
  params.validate();
  check_target(r);
  if (regime == Regime::kAsymptotic) return asymptotic_point(params, r, -phi_inv_plus(r));

  const bool with_ns = params.n <= kMaxJointCountDimension;
  const ThresholdTable table = threshold_table(params.n, params.delta, with_ns);
  const FeasibleRange range = feasible_cuts(table, params, r);
  if (range.empty()) {
    throw InfeasibleError("no threshold reaches normalized revenue " + format_number(r) +
                          " at n=" + std::to_string(params.n));
  }
  int best = range.lo;
  double best_surplus = threshold_surplus(table, params, best);
  for (int cut = range.lo + 1; cut <= range.hi; ++cut) {
    const double value = threshold_surplus(table, params, cut);
    if (value > best_surplus) {
      best = cut;
      best_surplus = value;
    }
  }
  FrontierPoint p = finite_point(table, params, r, best);
  p.threshold_alternate = table.nu(range.hi);
  p.ns_alternate = table_ns(table, range.hi);
  return p;
}

FrontierPoint min_bias_threshold(const MechanismParams& params, double r, Regime regime) {
  params.validate();
  check_target(r);
  if (regime == Regime::kAsymptotic) {
    FrontierPoint p = asymptotic_point(params, r, phi_inv_plus(r));
    p.boundary_weight = 1.0;
    return p;
  }

  const bool with_ns = params.n <= kMaxJointCountDimension;
  const ThresholdTable table = threshold_table(params.n, params.delta, with_ns);
  const FeasibleRange range = feasible_cuts(table, params, r);
  if (range.empty()) {
    throw InfeasibleError("no threshold reaches normalized revenue " + format_number(r) +
                          " at n=" + std::to_string(params.n));
  }
  // Greedy fill from the top: cells above `cut` in full, a fraction of `cut`.
  const int cut = range.hi;
  if (cut > params.n) return finite_point(table, params, r, cut);
  const double target = r * (1.0 - 2.0 * params.delta) * std::sqrt(static_cast<double>(params.n));
  const double above = threshold_revenue(table, params, cut + 1);
  const double full = threshold_revenue(table, params, cut);
  double weight = 1.0;
  if (full > above) weight = std::clamp((target - above) / (full - above), 0.0, 1.0);
  if (meets_target(normalized_revenue(above, params), r)) weight = 0.0;

  FrontierPoint p = finite_point(table, params, r, cut);
  p.boundary_weight = weight;
  p.mean = table.mean[cut + 1] + weight * (table.mean[cut] - table.mean[cut + 1]);
  p.threshold_alternate = table.nu(range.lo);
  p.ns_alternate = table_ns(table, range.lo);
  return p;
}

OracleResult ns_min_bruteforce(const MechanismParams& params, double r, OracleScope scope) {
  params.validate();
  if (!(r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  const int n = params.n;
  const int limit =
      scope == OracleScope::kAllBoolean ? kMaxOracleDenseDimension : kMaxOracleAnonymousDimension;
  if (n > limit) {
    throw std::invalid_argument("oracle scope allows n <= " + std::to_string(limit) +
                                ", got " + std::to_string(n));
  }

  const std::uint64_t count = scope == OracleScope::kAllBoolean
                                  ? std::uint64_t{1} << (1u << n)
                                  : std::uint64_t{1} << (n + 1);
  // NS per function id, +inf when not monotone or below target.
  std::vector<double> ns(count, kInf);

  if (scope == OracleScope::kAllBoolean) {
    parallel_for(count, [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t id = begin; id < end; ++id) {
        double mean = 0.0;
        double level_one = 0.0;
        if (!boolean_marginally_monotone_dense(id, n, &mean, &level_one)) continue;
        const double rn =
            normalized_revenue(revenue_from_moments(mean, level_one, params), params);
        if (!meets_target(rn, r)) continue;
        const DenseFunction f = DenseFunction::tabulate(
            n, [id](std::uint32_t x) { return static_cast<double>((id >> x) & 1u); });
        ns[id] = sensitivity_exact(f, params.delta);
      }
    });
  } else {
    const JointCountDistribution joint = joint_count_distribution(n, params.delta);
    const Eigen::VectorXd w = binomial_half_pmf(n);
    // Exact C(n, m) for the monotonicity sign.
    std::vector<std::int64_t> binom(n + 1, 1);
    for (int m = 1; m <= n; ++m) binom[m] = binom[m - 1] * (n - m + 1) / m;
    parallel_for(count, [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t id = begin; id < end; ++id) {
        std::int64_t tilt = 0;
        double mean = 0.0;
        double first = 0.0;
        for (int m = 0; m <= n; ++m) {
          if ((id >> m) & 1u) {
            tilt += binom[m] * (2 * m - n);
            mean += w[m];
            first += w[m] * (2.0 * m - n);
          }
        }
        if (tilt < 0) continue;
        const double rn = normalized_revenue(revenue_from_moments(mean, first, params), params);
        if (!meets_target(rn, r)) continue;
        double cross = 0.0;
        for (int t = 0; t <= n; ++t) {
          const bool gt = (id >> t) & 1u;
          for (int s = 0; s <= n; ++s) {
            if (gt != static_cast<bool>((id >> s) & 1u)) cross += joint(s, t);
          }
        }
        ns[id] = cross;
      }
    });
  }

  OracleResult result;
  result.min_ns = kInf;
  for (std::uint64_t id = 0; id < count; ++id) {
    if (std::isinf(ns[id])) continue;
    ++result.feasible_count;
    result.min_ns = std::min(result.min_ns, ns[id]);
  }
  for (std::uint64_t id = 0; id < count && result.feasible_count > 0; ++id) {
    if (!std::isinf(ns[id]) && ns[id] <= result.min_ns + 1e-12) {
      result.argmin_functions.push_back(id);
    }
  }

  const ThresholdTable table = threshold_table(n, params.delta, true);
  result.ltf_ns = kInf;
  result.ltf_threshold = 0;
  for (int cut = 0; cut <= n + 1; ++cut) {
    const double rn = normalized_revenue(threshold_revenue(table, params, cut), params);
    if (meets_target(rn, r) && table.ns[cut] < result.ltf_ns) {
      result.ltf_ns = table.ns[cut];
      result.ltf_threshold = table.nu(cut);
    }
  }
  result.ltf_gap = result.feasible_count > 0 ? result.ltf_ns - result.min_ns : kNaN;
  return result;
}

std::vector<FrontierPoint> pareto_frontier(const MechanismParams& params,
                                           const std::vector<double>& r_grid,
                                           Regime regime) {
  params.validate();
  for (const double r : r_grid) check_target(r);
  std::vector<FrontierPoint> points;
  points.reserve(r_grid.size());
  if (regime == Regime::kAsymptotic) {
    for (const double r : r_grid) points.push_back(asymptotic_point(params, r, -phi_inv_plus(r)));
    return points;
  }
  const bool with_ns = params.n <= kMaxJointCountDimension;
  const ThresholdTable table = threshold_table(params.n, params.delta, with_ns);
  for (const double r : r_grid) {
    const FeasibleRange range = feasible_cuts(table, params, r);
    if (range.empty()) {
      points.push_back(infeasible_point(params, r));
      continue;
    }
    FrontierPoint p = finite_point(table, params, r, range.lo);
    p.threshold_alternate = table.nu(range.hi);
    p.ns_alternate = table_ns(table, range.hi);
    points.push_back(p);
  }
  return points;
}

std::vector<FrontierPoint> majority_curve(int n, double b,
                                          const std::vector<double>& delta_grid) {
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("b must be in [0, 1]");
  const int cut = (n + 1) / 2;  // smallest m with 2m - n >= 0
  const ThresholdTable table = threshold_table(n, 0.0, false);
  std::vector<FrontierPoint> points;
  for (const double delta : delta_grid) {
    if (!(delta >= 0.0 && delta <= 0.5)) {
      throw std::invalid_argument("delta must be in [0, 0.5], got " + format_number(delta));
    }
    const JointCountDistribution joint = joint_count_distribution(n, delta);
    const double rho = 1.0 - 2.0 * delta;
    const double root_n = std::sqrt(static_cast<double>(n));
    const double revenue = rho * table.first[cut] + (b - 1.0) / 2.0 * table.mean[cut];
    FrontierPoint p;
    p.regime = Regime::kFinite;
    p.n = n;
    p.delta = delta;
    p.b = b;
    p.r = revenue / root_n;
    p.threshold = table.nu(cut);
    p.ns = sensitivity_exact(AnonymousFunction::count_threshold(n, cut), joint);
    p.surplus_per_capita = b / 2.0 * table.mean[cut] + rho / 2.0 * table.first[cut] / n;
    p.revenue_normalized = rho > 0.0 ? revenue / (rho * root_n) : kNaN;
    p.mean = table.mean[cut];
    p.threshold_alternate = p.ns_alternate = kNaN;
    points.push_back(p);
  }
  return points;
}

std::vector<FrontierPoint> majority_curve_asymptotic(double b,
                                                     const std::vector<double>& delta_grid) {
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("b must be in [0, 1]");
  std::vector<FrontierPoint> points;
  for (const double delta : delta_grid) {
    const MajorityAsymptotics m = majority_asymptotics(delta, 1);
    FrontierPoint p;
    p.regime = Regime::kAsymptotic;
    p.n = 0;
    p.delta = delta;
    p.b = b;
    p.r = m.revenue;  // already divided by sqrt(n) at n = 1
    p.threshold = 0.0;
    p.ns = m.ns;
    p.surplus_per_capita = b / 4.0;
    p.revenue_normalized = delta < 0.5 ? m.revenue_normalized : kNaN;
    p.mean = 0.5;
    p.threshold_alternate = p.ns_alternate = kNaN;
    points.push_back(p);
  }
  return points;
}

void write_frontier_csv(std::ostream& out, const std::vector<FrontierPoint>& points) {
  out << "regime,n,delta,b,r,threshold,ns,surplus_per_capita,revenue_normalized\n";
  for (const FrontierPoint& p : points) {
    out << to_string(p.regime) << ','
        << (p.regime == Regime::kAsymptotic ? std::string("inf") : std::to_string(p.n)) << ','
        << format_number(p.delta) << ',' << format_number(p.b) << ',' << format_number(p.r)
        << ',' << format_number(p.threshold) << ',' << format_number(p.ns) << ','
        << format_number(p.surplus_per_capita) << ',' << format_number(p.revenue_normalized)
        << '\n';
  }
}

}  // namespace noisemech

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

#include "noisemech/mechanism.h"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "noisemech/binomial.h"
#include "noisemech/format.h"
#include "noisemech/noise.h"

namespace noisemech {
namespace {

void check_dimension(const AllocationRule& f, const MechanismParams& params) {
  params.validate();
  if (dimension(f) != params.n) {
    throw std::invalid_argument("function has n=" + std::to_string(dimension(f)) +
                                " but params.n=" + std::to_string(params.n));
  }
}

bool is_marginally_monotone(const AllocationRule& f) {
  return std::visit(
      [](const auto& h) { return monotonicity_check(h, Monotonicity::kMarginallyMonotone); },
      f);
}

// Coefficients of the IC band and IR right-hand sides for one setting.
struct Coefficients {
  double ic_high;  // upper bound factor on t(+1) - t(-1)
  double ic_low;   // lower bound factor
};

Coefficients ic_coefficients(const MechanismParams& params) {
  const double up = (params.b + 1.0) / 2.0;
  const double down = (params.b - 1.0) / 2.0;
  if (params.setting == Setting::kImperfectKnowledge) {
    return {up - params.delta, down + params.delta};
  }
  return {up, down};
}

ConstraintRow make_row(int agent, std::string name, double lhs, double rhs) {
  ConstraintRow row;
  row.agent = agent;
  row.constraint = std::move(name);
  row.lhs = lhs;
  row.rhs = rhs;
  row.slack = lhs - rhs;
  row.pass = row.slack >= -kConstraintTolerance;
  return row;
}

// IC band rows for one (f_minus, f_plus, t_minus, t_plus) quadruple.
void ic_rows(ConstraintReport& report, int agent, const std::string& family,
             const std::string& suffix, const MechanismParams& params,
             double f_minus, double f_plus, double t_minus, double t_plus) {
  const Coefficients c = ic_coefficients(params);
  const double df = f_plus - f_minus;
  const double dt = t_plus - t_minus;
  report.rows.push_back(make_row(agent, family + "-high" + suffix, c.ic_high * df, dt));
  report.rows.push_back(make_row(agent, family + "-low" + suffix, dt, c.ic_low * df));
}

void ir_rows(ConstraintReport& report, int agent, const std::string& family,
             const std::string& suffix, const MechanismParams& params,
             double f_minus, double f_plus, double t_minus, double t_plus) {
  const double d = params.delta;
  const double up = (params.b + 1.0) / 2.0;
  const double down = (params.b - 1.0) / 2.0;
  if (params.setting == Setting::kImperfectKnowledge) {
    report.rows.push_back(make_row(agent, family + "-high" + suffix, (up - d) * f_plus, t_plus));
    report.rows.push_back(make_row(agent, family + "-low" + suffix, (down + d) * f_minus, t_minus));
    return;
  }
  report.rows.push_back(make_row(agent, family + "-high" + suffix,
                                 up * ((1.0 - d) * f_plus + d * f_minus),
                                 (1.0 - d) * t_plus + d * t_minus));
  report.rows.push_back(make_row(agent, family + "-low" + suffix,
                                 down * (d * f_plus + (1.0 - d) * f_minus),
                                 d * t_plus + (1.0 - d) * t_minus));
}

// Inserts a zero bit at position i into a context of the other n-1 agents.
std::uint32_t expand_context(std::uint32_t ctx, int i) {
  const std::uint32_t low = ctx & ((std::uint32_t{1} << i) - 1);
  const std::uint32_t high = (ctx >> i) << (i + 1);
  return low | high;
}

}  // namespace

const char* to_string(Setting setting) {
  return setting == Setting::kNoisyReport ? "noisy-report" : "imperfect-knowledge";
}

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::kBnIc:
      return "bn-ic";
    case Constraint::kDsIc:
      return "ds-ic";
    case Constraint::kIir:
      return "iir";
    case Constraint::kEir:
      return "eir";
  }
  return "?";
}

void MechanismParams::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("delta must be in (0, 0.5)");
  }
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("b must be in [0, 1]");
}

LowDegreeSummary low_degree_summary(const AllocationRule& f) {
  LowDegreeSummary s;
  s.n = dimension(f);
  if (const auto* dense = std::get_if<DenseFunction>(&f)) {
    s.mean = dense->mean();
    s.level_one_sum = level_one_coefficients(*dense).sum();
  } else {
    const AnonymousMoments m = anonymous_moments(std::get<AnonymousFunction>(f));
    s.mean = m.mean;
    s.level_one_sum = m.first;
  }
  return s;
}

InterimProfile interim_marginals(const AllocationRule& f, const MechanismParams& params) {
  check_dimension(f, params);
  InterimProfile profile(params.n);
  if (const auto* dense = std::get_if<DenseFunction>(&f)) {
    const double mean = dense->mean();
    const Eigen::VectorXd level_one = level_one_coefficients(*dense);
    for (int i = 0; i < params.n; ++i) {
      profile[i] = {mean - level_one[i], mean + level_one[i]};
    }
  } else {
    const auto& anon = std::get<AnonymousFunction>(f);
    const double mean = anonymous_moments(anon).mean;
    const double c = level_one_coefficient(anon);
    for (auto& pair : profile) pair = {mean - c, mean + c};
  }
  return profile;
}

double revenue(const LowDegreeSummary& s, const MechanismParams& params) {
  params.validate();
  double coeff = (params.b - 1.0) / 2.0;
  if (params.setting == Setting::kImperfectKnowledge) coeff += params.delta;
  return (1.0 - 2.0 * params.delta) * s.level_one_sum + coeff * s.mean;
}

double revenue(const AllocationRule& f, const MechanismParams& params) {
  check_dimension(f, params);
  return revenue(low_degree_summary(f), params);
}

double surplus(const LowDegreeSummary& s, const MechanismParams& params) {
  params.validate();
  return params.b * s.n / 2.0 * s.mean + (1.0 - 2.0 * params.delta) / 2.0 * s.level_one_sum;
}

double surplus(const AllocationRule& f, const MechanismParams& params) {
  check_dimension(f, params);
  return surplus(low_degree_summary(f), params);
}

double surplus_distortion_bound(const AllocationRule& f, const MechanismParams& params) {
  check_dimension(f, params);
  const double n = params.n;
  const double ns = sensitivity_exact(f, params.delta);
  return std::sqrt(params.b * params.b * n * n + n) / 2.0 * std::sqrt(ns);
}

const Eigen::VectorXd& TransferSchedule::expost_for(int agent) const {
  if (anonymous_expost.empty()) throw std::logic_error("no ex-post transfers");
  if (anonymous_expost.size() == 1) return anonymous_expost.front();
  return anonymous_expost.at(agent);
}

double TransferSchedule::expected_revenue() const {
  double total = 0.0;
  for (const InterimPair& p : interim) total += 0.5 * (p.v_minus + p.v_plus);
  return total;
}

TransferSchedule optimal_interim_transfers(const AllocationRule& f,
                                           const MechanismParams& params) {
  check_dimension(f, params);
  if (!is_marginally_monotone(f)) {
    throw std::invalid_argument("allocation rule is not marginally monotone");
  }
  const double d = params.delta;
  const double up = (params.b + 1.0) / 2.0;
  const double down = (params.b - 1.0) / 2.0;
  TransferSchedule schedule;
  schedule.setting = params.setting;
  schedule.interim.reserve(params.n);
  for (const InterimPair& fp : interim_marginals(f, params)) {
    InterimPair t;
    if (params.setting == Setting::kImperfectKnowledge) {
      t.v_minus = (down + d) * fp.v_minus;
      t.v_plus = (up - d) * fp.v_plus - (1.0 - 2.0 * d) * fp.v_minus;
    } else {
      t.v_minus = -d * fp.v_plus + (down + d) * fp.v_minus;
      t.v_plus = (up - d) * fp.v_plus - (1.0 - d) * fp.v_minus;
    }
    schedule.interim.push_back(t);
  }
  return schedule;
}

TransferSchedule low_bnic_extreme_transfers(const AllocationRule& f,
                                            const MechanismParams& params) {
  check_dimension(f, params);
  const double c = ic_coefficients(params).ic_low;
  TransferSchedule schedule;
  schedule.setting = params.setting;
  for (const InterimPair& fp : interim_marginals(f, params)) {
    schedule.interim.push_back({c * fp.v_minus, c * fp.v_plus});
  }
  return schedule;
}

Eigen::VectorXd solve_anonymous_transfer(int n, double beta_minus, double beta_plus) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const Eigen::VectorXd w = binomial_half_pmf(n - 1);
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(2, n + 1);
  system.row(0).head(n) = w.transpose();
  system.row(1).tail(n) = w.transpose();
  const Eigen::Vector2d rhs(beta_minus, beta_plus);
  return system.completeOrthogonalDecomposition().solve(rhs);
}

TransferSchedule with_anonymous_expost(const TransferSchedule& schedule,
                                       const AllocationRule& f) {
  const int n = dimension(f);
  if (static_cast<int>(schedule.interim.size()) != n) {
    throw std::invalid_argument("transfer schedule has the wrong agent count");
  }
  TransferSchedule out = schedule;
  out.anonymous_expost.clear();
  if (std::holds_alternative<AnonymousFunction>(f)) {
    const InterimPair& p = schedule.interim.front();
    out.anonymous_expost.push_back(solve_anonymous_transfer(n, p.v_minus, p.v_plus));
  } else {
    for (const InterimPair& p : schedule.interim) {
      out.anonymous_expost.push_back(solve_anonymous_transfer(n, p.v_minus, p.v_plus));
    }
  }
  return out;
}

bool ConstraintReport::pass() const {
  for (const ConstraintRow& row : rows) {
    if (!row.pass) return false;
  }
  return true;
}

double ConstraintReport::min_slack(const std::string& prefix) const {
  double best = std::numeric_limits<double>::infinity();
  for (const ConstraintRow& row : rows) {
    if (row.constraint.rfind(prefix, 0) == 0) best = std::min(best, row.slack);
  }
  return best;
}

void ConstraintReport::append(const ConstraintReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

ConstraintReport check_constraints(const AllocationRule& f,
                                   const TransferSchedule& transfers,
                                   const MechanismParams& params, Constraint which) {
  check_dimension(f, params);
  if (transfers.setting != params.setting) {
    throw std::invalid_argument("transfer schedule was built for another setting");
  }
  if (static_cast<int>(transfers.interim.size()) != params.n) {
    throw std::invalid_argument("transfer schedule has the wrong agent count");
  }
  const bool anonymous = std::holds_alternative<AnonymousFunction>(f);
  const int agents = anonymous ? 1 : params.n;
  ConstraintReport report;

  if (which == Constraint::kBnIc || which == Constraint::kIir) {
    const InterimProfile fm = interim_marginals(f, params);
    for (int i = 0; i < agents; ++i) {
      const InterimPair& fp = fm[i];
      const InterimPair& tp = transfers.interim[i];
      if (which == Constraint::kBnIc) {
        ic_rows(report, i, "bn-ic", "", params, fp.v_minus, fp.v_plus, tp.v_minus, tp.v_plus);
      } else {
        ir_rows(report, i, "iir", "", params, fp.v_minus, fp.v_plus, tp.v_minus, tp.v_plus);
      }
    }
    return report;
  }

  if (!transfers.has_expost()) {
    throw std::invalid_argument(std::string(to_string(which)) +
                                " needs ex-post transfers");
  }
  const std::string family = to_string(which);
  const auto emit = [&](int agent, const std::string& suffix, double f_minus,
                        double f_plus, double t_minus, double t_plus) {
    if (which == Constraint::kDsIc) {
      ic_rows(report, agent, family, suffix, params, f_minus, f_plus, t_minus, t_plus);
    } else {
      ir_rows(report, agent, family, suffix, params, f_minus, f_plus, t_minus, t_plus);
    }
  };

  if (anonymous) {
    const auto& g = std::get<AnonymousFunction>(f);
    const Eigen::VectorXd& t = transfers.expost_for(0);
    for (int k = 0; k < params.n; ++k) {
      emit(0, "@m=" + std::to_string(k), g[k], g[k + 1], t[k], t[k + 1]);
    }
    return report;
  }
  const auto& dense = std::get<DenseFunction>(f);
  const std::uint32_t contexts = std::uint32_t{1} << (params.n - 1);
  for (int i = 0; i < params.n; ++i) {
    const Eigen::VectorXd& t = transfers.expost_for(i);
    const std::uint32_t bit = std::uint32_t{1} << i;
    for (std::uint32_t ctx = 0; ctx < contexts; ++ctx) {
      const std::uint32_t point = expand_context(ctx, i);
      const int others = std::popcount(ctx);
      emit(i, "@ctx=" + std::to_string(ctx), dense[point], dense[point | bit],
           t[others], t[others + 1]);
    }
  }
  return report;
}

void write_csv(std::ostream& out, const ConstraintReport& report) {
  out << "agent,constraint,lhs,rhs,slack,pass\n";
  for (const ConstraintRow& row : report.rows) {
    out << row.agent << ',' << row.constraint << ',' << format_number(row.lhs) << ','
        << format_number(row.rhs) << ',' << format_number(row.slack) << ','
        << (row.pass ? "true" : "false") << '\n';
  }
}

}  // namespace noisemech

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

// Public-good provision with binary types x_i in {-1,+1} and utility
// ((b + x_i)/2) * provision - transfer. Two settings:
//
//   noisy-report         agents know x_i, their report is flipped in transit.
//   imperfect-knowledge  agents observe a flipped signal y_i of x_i and
//                        report it faithfully.
//
// Interim quantities h_i(z) = E[h(z, y_-i)] are indexed by the received
// report z; f_minus/f_plus below stand for f_i(-1) and f_i(+1).

#ifndef NOISEMECH_MECHANISM_H_
#define NOISEMECH_MECHANISM_H_

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noisemech/function_spec.h"

namespace noisemech {

inline constexpr double kConstraintTolerance = 1e-9;

enum class Setting { kNoisyReport, kImperfectKnowledge };

const char* to_string(Setting setting);

struct MechanismParams {
  int n = 1;
  double delta = 0.1;
  double b = 0.0;
  Setting setting = Setting::kNoisyReport;

  // n >= 1, 0 < delta < 1/2, 0 <= b <= 1; throws std::invalid_argument.
  void validate() const;
};

struct InterimPair {
  double v_minus = 0.0;
  double v_plus = 0.0;
};

// One entry per agent.
using InterimProfile = std::vector<InterimPair>;

// Mean and level-one mass E[f * sum_i x_i]; enough for revenue and surplus.
struct LowDegreeSummary {
  int n = 0;
  double mean = 0.0;
  double level_one_sum = 0.0;
};

LowDegreeSummary low_degree_summary(const AllocationRule& f);

// (E[f] - f^({i}), E[f] + f^({i})) for each agent.
InterimProfile interim_marginals(const AllocationRule& f, const MechanismParams& params);

// noisy-report:        (1 - 2 delta) E[f sum x] + ((b - 1)/2) E[f]
// imperfect-knowledge: (1 - 2 delta) E[f sum x] + ((b - 1)/2 + delta) E[f]
double revenue(const LowDegreeSummary& s, const MechanismParams& params);
double revenue(const AllocationRule& f, const MechanismParams& params);

// E[sum_i ((b + x_i)/2) f(y)] = (b n / 2) E[f] + ((1 - 2 delta)/2) E[f sum x].
double surplus(const LowDegreeSummary& s, const MechanismParams& params);
double surplus(const AllocationRule& f, const MechanismParams& params);

// (sqrt(b^2 n^2 + n) / 2) sqrt(NS_delta[f]); Cauchy-Schwarz bound on the
// expected surplus change caused by the flips. Boolean f only.
double surplus_distortion_bound(const AllocationRule& f, const MechanismParams& params);

struct TransferSchedule {
  InterimProfile interim;
  // Ex-post transfers t(m) over the received +1 count m = 0..n. Empty when
  // absent, a single vector when every agent shares it, else one per agent.
  std::vector<Eigen::VectorXd> anonymous_expost;
  Setting setting = Setting::kNoisyReport;

  bool has_expost() const { return !anonymous_expost.empty(); }
  const Eigen::VectorXd& expost_for(int agent) const;
  // Sum over agents of (t_i(-1) + t_i(+1)) / 2.
  double expected_revenue() const;
};

// Revenue-maximizing interim transfers: low-type IIR and high-type BN-IC
// bind. Throws std::invalid_argument if f is not marginally monotone.
TransferSchedule optimal_interim_transfers(const AllocationRule& f,
                                           const MechanismParams& params);

// The other candidate vertex, where low-type IIR and low-type BN-IC bind.
// Per agent it collects (1/2 - delta)(f_plus - f_minus) less than the optimum.
TransferSchedule low_bnic_extreme_transfers(const AllocationRule& f,
                                            const MechanismParams& params);

// Minimum-norm t(0..n) with
//   sum_m t(m)   C(n-1, m) / 2^(n-1) = beta_minus,
//   sum_m t(m+1) C(n-1, m) / 2^(n-1) = beta_plus.
Eigen::VectorXd solve_anonymous_transfer(int n, double beta_minus, double beta_plus);

// Copy of `schedule` with ex-post transfers matching its interim pairs.
// Anonymous f gets one shared vector; dense f one vector per agent.
TransferSchedule with_anonymous_expost(const TransferSchedule& schedule,
                                       const AllocationRule& f);

enum class Constraint { kBnIc, kDsIc, kIir, kEir };

const char* to_string(Constraint c);

struct ConstraintRow {
  int agent = 0;
  // e.g. "bn-ic-high", "iir-low", "ds-ic-low@ctx=5", "eir-high@m=3".
  std::string constraint;
  double lhs = 0.0;
  double rhs = 0.0;
  // lhs - rhs; the row passes iff slack >= -kConstraintTolerance.
  double slack = 0.0;
  bool pass = true;
};

struct ConstraintReport {
  std::vector<ConstraintRow> rows;

  bool pass() const;
  // Smallest slack among rows whose name starts with `prefix`.
  double min_slack(const std::string& prefix) const;
  void append(const ConstraintReport& other);
};

// Rows for one constraint family. Anonymous f is symmetric, so only agent 0
// is listed. ds-ic and eir need ex-post transfers (std::invalid_argument
// otherwise).
ConstraintReport check_constraints(const AllocationRule& f,
                                   const TransferSchedule& transfers,
                                   const MechanismParams& params, Constraint which);

// Header agent,constraint,lhs,rhs,slack,pass; numbers at 12 significant
// digits.
void write_csv(std::ostream& out, const ConstraintReport& report);

}  // namespace noisemech

#endif  // NOISEMECH_MECHANISM_H_

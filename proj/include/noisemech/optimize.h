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

// Threshold optimizers and exhaustive oracles.
//
// Count thresholds are indexed by cut k = 0..n+1, g[m] = 1 iff m >= k, so
// the nu-threshold is 2k - n and k = n+1 is the zero rule. Normalized
// revenue is r = R / ((1 - 2 delta) sqrt(n)).

#ifndef NOISEMECH_OPTIMIZE_H_
#define NOISEMECH_OPTIMIZE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noisemech/mechanism.h"

namespace noisemech {

inline constexpr int kMaxOracleDenseDimension = 4;
inline constexpr int kMaxOracleAnonymousDimension = 20;
inline constexpr double kFeasibilityTolerance = 1e-12;

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Regime { kFinite, kAsymptotic };

const char* to_string(Regime regime);

// Mean, E[f nu] and (optionally) noise sensitivity of every count threshold.
struct ThresholdTable {
  int n = 0;
  double delta = 0.0;
  Eigen::VectorXd mean;   // size n+2
  Eigen::VectorXd first;  // E[f nu], size n+2
  Eigen::VectorXd ns;     // size n+2, or empty when not requested

  int nu(int cut) const { return 2 * cut - n; }
};

// with_ns needs n <= kMaxJointCountDimension.
ThresholdTable threshold_table(int n, double delta, bool with_ns);

// Revenue, surplus and normalized revenue of cut k under `params`.
double threshold_revenue(const ThresholdTable& table, const MechanismParams& params, int cut);
double threshold_surplus(const ThresholdTable& table, const MechanismParams& params, int cut);
double normalized_revenue(double revenue, const MechanismParams& params);

struct RevenueMaxResult {
  // 2 / ((1 - b)(1 - 2 delta)); absent when b = 1.
  std::optional<double> tau_paper;
  // (1 - b) / (2 (1 - 2 delta)), the sign change of (1 - 2 delta) nu + (b - 1)/2.
  double tau_pointwise = 0.0;
  // Exact argmax nu over the n+1 nonzero thresholds, ties to the smallest.
  int finite_opt = 0;
  double revenue = 0.0;
  double revenue_normalized = 0.0;
  std::string note;
};

// Accepts delta in [0, 1/2) so that the noiseless case can be tabulated.
RevenueMaxResult revenue_max_threshold(const MechanismParams& params);

struct FrontierPoint {
  Regime regime = Regime::kFinite;
  int n = 0;  // 0 in the asymptotic regime
  double delta = 0.0;
  double b = 0.0;
  double r = 0.0;
  // Finite: integer nu-threshold. Asymptotic: threshold on nu / sqrt(n).
  double threshold = 0.0;
  double ns = 0.0;
  double surplus_per_capita = 0.0;
  double revenue_normalized = 0.0;
  double mean = 0.0;
  // Min-bias only: weight in (0, 1] on the cell at `threshold`, every cell
  // above it being provided in full. 1 means the threshold rule itself.
  double boundary_weight = 1.0;
  // The mirrored candidate (the high threshold on the frontier).
  double threshold_alternate = 0.0;
  double ns_alternate = 0.0;
  bool feasible = true;
};

// Most surplus among thresholds meeting r (finite), or threshold
// -phi_inv_plus(r) (asymptotic). Throws InfeasibleError or
// std::invalid_argument.
FrontierPoint surplus_max_threshold(const MechanismParams& params, double r, Regime regime);

// Least mean over [0,1]-valued anonymous rules meeting r. The finite optimum
// is a threshold plus a fractional boundary cell; `mean` is that LP value
// while threshold, ns, surplus and revenue describe the Boolean rule that
// also provides the boundary cell in full.
FrontierPoint min_bias_threshold(const MechanismParams& params, double r, Regime regime);

enum class OracleScope { kAllBoolean, kAnonymous };

struct OracleResult {
  double min_ns = 0.0;
  // Truth-table bitmasks: bit x for dense points, bit m for count values.
  std::vector<std::uint64_t> argmin_functions;
  std::uint64_t feasible_count = 0;
  double ltf_ns = 0.0;   // best feasible count threshold
  int ltf_threshold = 0;  // its nu-threshold
  double ltf_gap = 0.0;  // ltf_ns - min_ns; NaN when infeasible
};

// Exhaustive minimum of NS over marginally monotone Boolean rules with
// normalized revenue >= r. Infeasible targets give feasible_count = 0 and
// min_ns = +inf.
OracleResult ns_min_bruteforce(const MechanismParams& params, double r, OracleScope scope);

// One point per r: low threshold emitted, high threshold in *_alternate.
// Finite points that cannot meet r carry feasible = false.
std::vector<FrontierPoint> pareto_frontier(const MechanismParams& params,
                                           const std::vector<double>& r_grid,
                                           Regime regime);

// Majority rule 1{nu >= 0} across delta in [0, 1/2]. In the CSV, column r
// holds R / sqrt(n) and revenue_normalized holds R / ((1 - 2 delta) sqrt(n)).
std::vector<FrontierPoint> majority_curve(int n, double b, const std::vector<double>& delta_grid);
std::vector<FrontierPoint> majority_curve_asymptotic(double b,
                                                     const std::vector<double>& delta_grid);

// regime,n,delta,b,r,threshold,ns,surplus_per_capita,revenue_normalized
void write_frontier_csv(std::ostream& out, const std::vector<FrontierPoint>& points);

}  // namespace noisemech

#endif  // NOISEMECH_OPTIMIZE_H_

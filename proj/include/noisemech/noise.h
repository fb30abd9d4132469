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

// The flip channel. y is the delta-noisy copy of a uniform x: every
// coordinate is negated independently with probability delta, so that
// E[x_i y_i] = 1 - 2 delta. Noise computations accept the closed interval
// delta in [0, 1/2] so that limits can be probed directly.

#ifndef NOISEMECH_NOISE_H_
#define NOISEMECH_NOISE_H_

#include <cstdint>

#include <Eigen/Dense>

#include "noisemech/function_spec.h"
#include "noisemech/hypercube.h"

namespace noisemech {

inline constexpr int kMaxJointCountDimension = 2000;
inline constexpr std::uint64_t kMonteCarloBatch = std::uint64_t{1} << 16;

// Law of (m_x, m_y), the +1 counts of x and of its noisy copy y.
class JointCountDistribution {
 public:
  JointCountDistribution(int n, double delta, Eigen::MatrixXd pmf)
      : n_(n), delta_(delta), pmf_(std::move(pmf)) {}

  int n() const { return n_; }
  double delta() const { return delta_; }
  // Entry (s, t) = P(m_x = s, m_y = t).
  const Eigen::MatrixXd& pmf() const { return pmf_; }
  double operator()(int s, int t) const { return pmf_(s, t); }

 private:
  int n_;
  double delta_;
  Eigen::MatrixXd pmf_;
};

// Dynamic programme over coordinates; O(n^3) time, O(n^2) memory.
// Throws std::invalid_argument for n outside [1, 2000] or delta outside
// [0, 1/2].
JointCountDistribution joint_count_distribution(int n, double delta);

// T_rho f(x) = E[f(y) | x] with E[x_i y_i] = rho. rho must lie in [0, 1].
DenseFunction noise_operator(const DenseFunction& f, double rho);

// Stab_delta[f] = E[f(x) f(y)].
double stability_exact(const DenseFunction& f, double delta);
double stability_exact(const AnonymousFunction& f, double delta);
double stability_exact(const AnonymousFunction& f,
                       const JointCountDistribution& joint);
double stability_exact(const AllocationRule& f, double delta);

// NS_delta[f] = P(f(x) != f(y)) = 2 (E[f] - Stab_delta[f]); f must be
// {0,1}-valued.
double sensitivity_exact(const DenseFunction& f, double delta);
double sensitivity_exact(const AnonymousFunction& f, double delta);
double sensitivity_exact(const AnonymousFunction& f,
                         const JointCountDistribution& joint);
double sensitivity_exact(const AllocationRule& f, double delta);

// Noise sensitivity of every count threshold 1{m >= cut}, cut = 0..n+1, in
// O(n^2) from one joint distribution.
Eigen::VectorXd threshold_sensitivities(const JointCountDistribution& joint);

struct MonteCarloEstimate {
  double estimate = 0.0;
  // Binomial standard error sqrt(p (1 - p) / samples).
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t disagreements = 0;
};

// Samples are drawn in batches of kMonteCarloBatch; batch j uses its own
// mt19937_64 stream seeded from (seed, j), so the estimate does not depend
// on NOISEMECH_THREADS.
MonteCarloEstimate sensitivity_monte_carlo(const DenseFunction& f, double delta,
                                           std::uint64_t samples,
                                           std::uint64_t seed);
MonteCarloEstimate sensitivity_monte_carlo(const AnonymousFunction& f,
                                           double delta, std::uint64_t samples,
                                           std::uint64_t seed);
MonteCarloEstimate sensitivity_monte_carlo(const AllocationRule& f,
                                           double delta, std::uint64_t samples,
                                           std::uint64_t seed);

}  // namespace noisemech

#endif  // NOISEMECH_NOISE_H_

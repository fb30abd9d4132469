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

// Standard normal kit and the large-n limits of threshold rules.

#ifndef NOISEMECH_GAUSSIAN_H_
#define NOISEMECH_GAUSSIAN_H_

#include <cstdint>

namespace noisemech {

// 1/sqrt(2 pi), the peak of the standard normal density.
inline constexpr double kMaxDensity = 0.39894228040143267794;

double normal_pdf(double x);
double normal_cdf(double x);
// 1 - cdf without cancellation.
double normal_ccdf(double x);
// Inverse cdf on (0, 1). Throws std::invalid_argument otherwise.
double normal_quantile(double p);

enum class ScalarKind { kPdf, kCdf, kCcdf, kQuantile };
double gaussian_scalar(ScalarKind kind, double arg);

// Correlated standard pair (Z1, Z2) with E[Z1 Z2] = rho.
class GaussianPair {
 public:
  explicit GaussianPair(double rho);
  double rho() const { return rho_; }
  // P(Z1 <= t1, Z2 <= t2).
  double cdf(double t1, double t2) const;

 private:
  double rho_;
};

// Single-integral reduction over theta in [0, asin rho], 128-point
// Gauss-Legendre. |rho| <= 1.
double binormal_cdf(double t1, double t2, double rho);

// The t >= 0 with normal_pdf(t) = r, for 0 < r <= kMaxDensity. Values a few
// ulps above kMaxDensity are treated as the peak.
double phi_inv_plus(double r);

struct MajorityAsymptotics {
  double ns = 0.0;
  double revenue = 0.0;
  double revenue_normalized = 0.0;
};

// delta in [0, 1/2], n >= 1.
MajorityAsymptotics majority_asymptotics(double delta, std::int64_t n);

// Limit noise sensitivity of 1{nu/sqrt(n) >= +-phi_inv_plus(r)}; the two
// signs give the same value.
double ltf_ns_asymptotic(double r, double delta);

// Limit of the least mean of a [0,1]-valued rule meeting normalized revenue r.
double alpha_limit(double r);

enum class PrivacyDirection { kEpsToDelta, kDeltaToEps };

// Randomized response: flipping with probability delta is eps-DP for
// delta >= 1/(1+e^eps). eps_to_delta returns that least delta.
double eps_to_delta(double eps);
double delta_to_eps(double delta);
double privacy_convert(PrivacyDirection direction, double value);

}  // namespace noisemech

#endif  // NOISEMECH_GAUSSIAN_H_

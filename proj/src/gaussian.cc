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

#include "noisemech/gaussian.h"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace noisemech {
namespace {

constexpr int kLegendreNodes = 128;
constexpr int kQuantileIterations = 200;
constexpr double kQuantileBracket = 38.5;

struct LegendreRule {
  std::array<double, kLegendreNodes> nodes{};
  std::array<double, kLegendreNodes> weights{};
};

// Nodes on [-1, 1] by Newton iteration on P_N from Chebyshev guesses.
LegendreRule make_legendre_rule() {
  LegendreRule rule;
  constexpr int n = kLegendreNodes;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const LegendreRule& legendre_rule() {
  static const LegendreRule rule = make_legendre_rule();
  return rule;
}

void check_density_level(double r) {
  if (!(r > 0.0 && r <= kMaxDensity * (1.0 + 1e-12))) {
    throw std::invalid_argument("r must be in (0, 1/sqrt(2 pi)], got " +
                                std::to_string(r));
  }
}

}  // namespace

double normal_pdf(double x) {
  return kMaxDensity * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_ccdf(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile argument must be in (0, 1), got " +
                                std::to_string(p));
  }
  // Work in the lower half; 1 - p is exact for p >= 1/2.
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double lo = -kQuantileBracket;
  double hi = 0.0;
  for (int iter = 0; iter < kQuantileIterations && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 3; ++iter) {
    const double density = normal_pdf(x);
    if (density <= 0.0) break;
    const double next = x - (normal_cdf(x) - p) / density;
    if (!(next >= lo - 1e-12 && next <= hi + 1e-12)) break;
    x = next;
  }
  return x;
}

double gaussian_scalar(ScalarKind kind, double arg) {
  switch (kind) {
    case ScalarKind::kPdf:
      return normal_pdf(arg);
    case ScalarKind::kCdf:
      return normal_cdf(arg);
    case ScalarKind::kCcdf:
      return normal_ccdf(arg);
    case ScalarKind::kQuantile:
      return normal_quantile(arg);
  }
  throw std::invalid_argument("unknown scalar kind");
}

GaussianPair::GaussianPair(double rho) : rho_(rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw std::invalid_argument("rho must be in [-1, 1], got " + std::to_string(rho));
  }
}

double GaussianPair::cdf(double t1, double t2) const {
  return binormal_cdf(t1, t2, rho_);
}

double binormal_cdf(double t1, double t2, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw std::invalid_argument("rho must be in [-1, 1], got " + std::to_string(rho));
  }
  if (rho == 1.0) return normal_cdf(std::min(t1, t2));
  if (rho == -1.0) return std::max(0.0, normal_cdf(t1) + normal_cdf(t2) - 1.0);

  // Phi_rho(h,k) = Phi(h)Phi(k)
  //   + (1/2pi) int_0^{asin rho} exp(-(h^2 + k^2 - 2hk sin u) / (2 cos^2 u)) du
  const double upper = std::asin(rho);
  const double half = 0.5 * upper;
  const double hk = t1 * t2;
  const double hh_kk = t1 * t1 + t2 * t2;
  const LegendreRule& rule = legendre_rule();
  double integral = 0.0;
  for (int j = 0; j < kLegendreNodes; ++j) {
    const double u = half * (rule.nodes[j] + 1.0);
    const double s = std::sin(u);
    const double c2 = 1.0 - s * s;
    integral += rule.weights[j] * std::exp(-(hh_kk - 2.0 * hk * s) / (2.0 * c2));
  }
  integral *= half;
  const double value =
      normal_cdf(t1) * normal_cdf(t2) + integral / (2.0 * std::numbers::pi);
  return std::clamp(value, 0.0, 1.0);
}

double phi_inv_plus(double r) {
  check_density_level(r);
  const double log_ratio = std::log(r / kMaxDensity);
  return log_ratio >= 0.0 ? 0.0 : std::sqrt(-2.0 * log_ratio);
}

MajorityAsymptotics majority_asymptotics(double delta, std::int64_t n) {
  if (!(delta >= 0.0 && delta <= 0.5)) {
    throw std::invalid_argument("delta must be in [0, 0.5], got " +
                                std::to_string(delta));
  }
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  MajorityAsymptotics result;
  result.ns = std::acos(1.0 - 2.0 * delta) / std::numbers::pi;
  result.revenue = (1.0 - 2.0 * delta) * kMaxDensity * std::sqrt(static_cast<double>(n));
  result.revenue_normalized = kMaxDensity;
  return result;
}

double ltf_ns_asymptotic(double r, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("delta must be in (0, 0.5), got " +
                                std::to_string(delta));
  }
  const double t = phi_inv_plus(r);
  const double ns =
      2.0 * (normal_cdf(-t) - binormal_cdf(-t, -t, 1.0 - 2.0 * delta));
  return std::clamp(ns, 0.0, 1.0);
}

double alpha_limit(double r) {
  return normal_ccdf(phi_inv_plus(r));
}

double eps_to_delta(double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("eps must be > 0, got " + std::to_string(eps));
  }
  return 1.0 / (1.0 + std::exp(eps));
}

double delta_to_eps(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("delta must be in (0, 0.5), got " +
                                std::to_string(delta));
  }
  return std::log((1.0 - delta) / delta);
}

double privacy_convert(PrivacyDirection direction, double value) {
  return direction == PrivacyDirection::kEpsToDelta ? eps_to_delta(value)
                                                    : delta_to_eps(value);
}

}  // namespace noisemech

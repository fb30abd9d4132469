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

#include "noisemech/hypercube.h"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisemech/binomial.h"

namespace noisemech {
namespace {

bool is_zero_or_one(double v) { return v == 0.0 || v == 1.0; }

// Exact binomial coefficients as 128-bit integers; valid for n <= 120.
std::vector<__int128> binomial_row(int n) {
  std::vector<__int128> row(n + 1, 0);
  row[0] = 1;
  for (int k = 1; k <= n; ++k) {
    row[k] = row[k - 1] * (n - k + 1) / k;
  }
  return row;
}

constexpr int kExactAnonymousLimit = 100;

}  // namespace

void DenseFunction::check_dimension(int n) {
  if (n < 1 || n > kMaxDenseDimension) {
    throw std::invalid_argument("dense function dimension must be in [1, " +
                                std::to_string(kMaxDenseDimension) +
                                "], got " + std::to_string(n));
  }
}

DenseFunction::DenseFunction(int n, Eigen::VectorXd values)
    : n_(n), values_(std::move(values)) {
  check_dimension(n);
  if (values_.size() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("dense function with n=" + std::to_string(n) +
                                " needs " + std::to_string(1L << n) +
                                " values, got " +
                                std::to_string(values_.size()));
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("dense function values must be finite");
  }
}

DenseFunction DenseFunction::constant(int n, double c) {
  check_dimension(n);
  return DenseFunction(n, Eigen::VectorXd::Constant(Eigen::Index{1} << n, c));
}

bool DenseFunction::is_boolean() const {
  return values_.unaryExpr([](double v) { return is_zero_or_one(v); }).all();
}

bool DenseFunction::is_unit_range() const {
  return (values_.array() >= 0.0).all() && (values_.array() <= 1.0).all();
}

FourierSpectrum::FourierSpectrum(int n, Eigen::VectorXd coeffs)
    : n_(n), coeffs_(std::move(coeffs)) {
  if (n < 1 || n > kMaxDenseDimension ||
      coeffs_.size() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("spectrum size does not match 2^n");
  }
}

AnonymousFunction::AnonymousFunction(int n, Eigen::VectorXd g)
    : n_(n), g_(std::move(g)) {
  if (n < 1 || n > kMaxAnonymousDimension) {
    throw std::invalid_argument("anonymous function dimension must be in [1, " +
                                std::to_string(kMaxAnonymousDimension) + "]");
  }
  if (g_.size() != n + 1) {
    throw std::invalid_argument("anonymous function with n=" +
                                std::to_string(n) + " needs " +
                                std::to_string(n + 1) + " values, got " +
                                std::to_string(g_.size()));
  }
  for (Eigen::Index m = 0; m < g_.size(); ++m) {
    if (!(g_[m] >= 0.0 && g_[m] <= 1.0)) {
      throw std::invalid_argument("anonymous function value g[" +
                                  std::to_string(m) + "] outside [0, 1]");
    }
  }
}

AnonymousFunction AnonymousFunction::threshold(int n, double theta) {
  Eigen::VectorXd g(n + 1);
  for (int m = 0; m <= n; ++m) g[m] = (2 * m - n >= theta) ? 1.0 : 0.0;
  return AnonymousFunction(n, std::move(g));
}

AnonymousFunction AnonymousFunction::count_threshold(int n, int cut) {
  if (cut < 0 || cut > n + 1) {
    throw std::out_of_range("count threshold must be in [0, n+1]");
  }
  Eigen::VectorXd g(n + 1);
  for (int m = 0; m <= n; ++m) g[m] = m >= cut ? 1.0 : 0.0;
  return AnonymousFunction(n, std::move(g));
}

bool AnonymousFunction::is_boolean() const {
  return g_.unaryExpr([](double v) { return is_zero_or_one(v); }).all();
}

DenseFunction AnonymousFunction::to_dense() const {
  if (n_ > kMaxDenseDimension) {
    throw std::invalid_argument("anonymous function too large to expand: n=" +
                                std::to_string(n_));
  }
  return DenseFunction::tabulate(
      n_, [this](std::uint32_t point) { return g_[std::popcount(point)]; });
}

AnonymousMoments anonymous_moments(const AnonymousFunction& f) {
  const int n = f.n();
  const Eigen::VectorXd w = binomial_half_pmf(n);
  AnonymousMoments moments;
  for (int m = 0; m <= n; ++m) {
    const double mass = f[m] * w[m];
    moments.mean += mass;
    moments.first += mass * (2 * m - n);
  }
  return moments;
}

FourierSpectrum fourier_transform(const DenseFunction& f) {
  Eigen::VectorXd coeffs = f.values();
  walsh_hadamard_in_place(coeffs);
  coeffs /= static_cast<double>(coeffs.size());
  return FourierSpectrum(f.n(), std::move(coeffs));
}

DenseFunction inverse_fourier(const FourierSpectrum& s) {
  Eigen::VectorXd values = s.coeffs();
  inverse_walsh_hadamard_in_place(values);
  return DenseFunction(s.n(), std::move(values));
}

Eigen::VectorXd level_one_coefficients(const DenseFunction& f) {
  Eigen::VectorXd level_one = Eigen::VectorXd::Zero(f.n());
  const auto size = static_cast<std::uint32_t>(f.size());
  for (std::uint32_t x = 0; x < size; ++x) {
    const double v = f[x];
    if (v == 0.0) continue;
    for (int i = 0; i < f.n(); ++i) level_one[i] += coordinate(x, i) * v;
  }
  return level_one / static_cast<double>(size);
}

double level_one_coefficient(const AnonymousFunction& f) {
  return anonymous_moments(f).first / f.n();
}

double influence(const FourierSpectrum& s, int i) {
  if (i < 0 || i >= s.n()) {
    throw std::out_of_range("coordinate " + std::to_string(i) +
                            " out of range for n=" + std::to_string(s.n()));
  }
  double total = 0.0;
  const auto bit = std::uint32_t{1} << i;
  for (std::uint32_t subset = 0; subset < s.coeffs().size(); ++subset) {
    if (subset & bit) total += s[subset] * s[subset];
  }
  return total;
}

double influence(const DenseFunction& f, int i) {
  if (i < 0 || i >= f.n()) {
    throw std::out_of_range("coordinate " + std::to_string(i) +
                            " out of range for n=" + std::to_string(f.n()));
  }
  return influence(fourier_transform(f), i);
}

bool monotonicity_check(const DenseFunction& f, Monotonicity kind) {
  if (!f.is_unit_range()) {
    throw std::invalid_argument("monotonicity_check requires a [0,1]-valued f");
  }
  const int n = f.n();
  const auto size = static_cast<std::uint32_t>(f.size());
  const bool exact = f.is_boolean();

  if (kind == Monotonicity::kMonotone) {
    const double tol = exact ? 0.0 : kMonotonicityTolerance;
    for (int i = 0; i < n; ++i) {
      const auto bit = std::uint32_t{1} << i;
      for (std::uint32_t x = 0; x < size; ++x) {
        if ((x & bit) == 0 && f[x | bit] - f[x] < -tol) return false;
      }
    }
    return true;
  }

  if (exact) {
    // 2^n * f^({i}) is an integer for Boolean f.
    for (int i = 0; i < n; ++i) {
      std::int64_t sum = 0;
      for (std::uint32_t x = 0; x < size; ++x) {
        if (f[x] != 0.0) sum += coordinate(x, i);
      }
      if (sum < 0) return false;
    }
    return true;
  }
  const Eigen::VectorXd level_one = level_one_coefficients(f);
  return ((2.0 * level_one).array() >= -kMonotonicityTolerance).all();
}

bool monotonicity_check(const AnonymousFunction& f, Monotonicity kind) {
  const int n = f.n();
  if (kind == Monotonicity::kMonotone) {
    const double tol = f.is_boolean() ? 0.0 : kMonotonicityTolerance;
    for (int m = 0; m < n; ++m) {
      if (f[m + 1] - f[m] < -tol) return false;
    }
    return true;
  }
  if (f.is_boolean() && n <= kExactAnonymousLimit) {
    const std::vector<__int128> row = binomial_row(n);
    __int128 sum = 0;
    for (int m = 0; m <= n; ++m) {
      if (f[m] != 0.0) sum += row[m] * (2 * m - n);
    }
    return sum >= 0;
  }
  return 2.0 * level_one_coefficient(f) >= -kMonotonicityTolerance;
}

}  // namespace noisemech

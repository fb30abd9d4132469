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

// Real-valued functions on the hypercube {-1,+1}^n, their Walsh-Fourier
// expansion and the monotonicity predicates used for implementability.
//
// Point encoding: a point is a bitmask k in [0, 2^n); coordinate i equals +1
// iff bit i of k is set. Subsets S of [n] use the same little-endian masks.

#ifndef NOISEMECH_HYPERCUBE_H_
#define NOISEMECH_HYPERCUBE_H_

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

namespace noisemech {

inline constexpr int kMaxDenseDimension = 24;
inline constexpr int kMaxAnonymousDimension = 1'000'000;

// Tolerance applied to degree-1 coefficients and pointwise differences when
// the function is not {0,1}-valued.
inline constexpr double kMonotonicityTolerance = 1e-12;

// +1 or -1, the value of coordinate i at `point`.
inline int coordinate(std::uint32_t point, int i) {
  return ((point >> i) & 1u) ? 1 : -1;
}

// Unnormalized fast Walsh-Hadamard analysis, in place. After the call
// v[S] = sum_x v_in[x] * chi_S(x). The size of v must be a power of two.
template <typename Derived>
void walsh_hadamard_in_place(Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index size = v.size();
  for (Eigen::Index half = 1; half < size; half <<= 1) {
    for (Eigen::Index block = 0; block < size; block += 2 * half) {
      for (Eigen::Index j = block; j < block + half; ++j) {
        // Clear bit is x_i = -1, so chi_{i} is negative on the low half.
        const Scalar lo = v(j);
        const Scalar hi = v(j + half);
        v(j) = hi + lo;
        v(j + half) = hi - lo;
      }
    }
  }
}

// Synthesis counterpart: v[x] = sum_S v_in[S] * chi_S(x). Composing the two
// multiplies by 2^n.
template <typename Derived>
void inverse_walsh_hadamard_in_place(Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index size = v.size();
  for (Eigen::Index half = 1; half < size; half <<= 1) {
    for (Eigen::Index block = 0; block < size; block += 2 * half) {
      for (Eigen::Index j = block; j < block + half; ++j) {
        const Scalar without_i = v(j);
        const Scalar with_i = v(j + half);
        v(j) = without_i - with_i;
        v(j + half) = without_i + with_i;
      }
    }
  }
}

class DenseFunction {
 public:
  // Throws std::invalid_argument unless 1 <= n <= 24 and values has 2^n
  // finite entries.
  DenseFunction(int n, Eigen::VectorXd values);

  static DenseFunction constant(int n, double c);

  // Tabulates `f(point)` for every point.
  template <typename F>
  static DenseFunction tabulate(int n, F&& f) {
    check_dimension(n);
    Eigen::VectorXd values(Eigen::Index{1} << n);
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      values[k] = static_cast<double>(f(static_cast<std::uint32_t>(k)));
    }
    return DenseFunction(n, std::move(values));
  }

  int n() const { return n_; }
  Eigen::Index size() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](std::uint32_t point) const { return values_[point]; }

  double mean() const { return values_.mean(); }
  bool is_boolean() const;
  bool is_unit_range() const;

 private:
  static void check_dimension(int n);

  int n_;
  Eigen::VectorXd values_;
};

class FourierSpectrum {
 public:
  FourierSpectrum(int n, Eigen::VectorXd coeffs);

  int n() const { return n_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  double operator[](std::uint32_t subset) const { return coeffs_[subset]; }

  // Sum of squared coefficients, i.e. E[f^2] by Parseval.
  double total_weight() const { return coeffs_.squaredNorm(); }

 private:
  int n_;
  Eigen::VectorXd coeffs_;
};

// A [0,1]-valued function of the vote count m = #{i : x_i = +1}.
class AnonymousFunction {
 public:
  // g must have n+1 entries in [0,1]; 1 <= n <= 10^6.
  AnonymousFunction(int n, Eigen::VectorXd g);

  // g[m] = 1 iff 2m - n >= theta.
  static AnonymousFunction threshold(int n, double theta);

  // g[m] = 1 iff m >= cut; cut ranges over 0..n+1 (n+1 gives f == 0).
  static AnonymousFunction count_threshold(int n, int cut);

  int n() const { return n_; }
  const Eigen::VectorXd& g() const { return g_; }
  double operator[](int m) const { return g_[m]; }

  bool is_boolean() const;
  bool is_unit_range() const { return true; }

  // Expands to a truth table; requires n <= 24.
  DenseFunction to_dense() const;

 private:
  int n_;
  Eigen::VectorXd g_;
};

// E[f] and E[f * nu] under the uniform measure, with nu = 2m - n.
struct AnonymousMoments {
  double mean = 0.0;
  double first = 0.0;
};

AnonymousMoments anonymous_moments(const AnonymousFunction& f);

FourierSpectrum fourier_transform(const DenseFunction& f);
DenseFunction inverse_fourier(const FourierSpectrum& s);

// Degree-1 coefficients f^({i}) = E[f x_i], i = 0..n-1.
Eigen::VectorXd level_one_coefficients(const DenseFunction& f);

// Common degree-1 coefficient of an anonymous function, E[f nu] / n.
double level_one_coefficient(const AnonymousFunction& f);

// Inf_i[f] = sum over S containing i of f^(S)^2. Throws std::out_of_range.
double influence(const DenseFunction& f, int i);
double influence(const FourierSpectrum& s, int i);

enum class Monotonicity { kMonotone, kMarginallyMonotone };

// Requires a unit-range function. Boolean inputs are decided in exact integer
// arithmetic; otherwise the comparison allows kMonotonicityTolerance.
bool monotonicity_check(const DenseFunction& f, Monotonicity kind);
bool monotonicity_check(const AnonymousFunction& f, Monotonicity kind);

}  // namespace noisemech

#endif  // NOISEMECH_HYPERCUBE_H_

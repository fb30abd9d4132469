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

#include "noisemech/noise.h"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisemech/parallel.h"

namespace noisemech {
namespace {

void check_delta(double delta) {
  if (!(delta >= 0.0 && delta <= 0.5)) {
    throw std::invalid_argument("delta must be in [0, 0.5], got " +
                                std::to_string(delta));
  }
}

void require_boolean(bool boolean) {
  if (!boolean) {
    throw std::invalid_argument(
        "noise sensitivity is defined here for {0,1}-valued functions only");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t batch) {
  return splitmix64(seed ^ splitmix64(batch + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename BatchFn>
MonteCarloEstimate run_batches(std::uint64_t samples, std::uint64_t seed,
                               BatchFn&& batch_fn) {
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  const std::uint64_t batches = (samples + kMonteCarloBatch - 1) / kMonteCarloBatch;
  std::vector<std::uint64_t> hits(batches, 0);
  parallel_for(batches, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t j = begin; j < end; ++j) {
      const std::uint64_t first = j * kMonteCarloBatch;
      const std::uint64_t count = std::min(kMonteCarloBatch, samples - first);
      std::mt19937_64 rng(stream_seed(seed, j));
      hits[j] = batch_fn(rng, count);
    }
  });
  MonteCarloEstimate result;
  result.samples = samples;
  for (const std::uint64_t h : hits) result.disagreements += h;
  const double p = static_cast<double>(result.disagreements) / static_cast<double>(samples);
  result.estimate = p;
  result.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return result;
}

}  // namespace

JointCountDistribution joint_count_distribution(int n, double delta) {
  if (n < 1 || n > kMaxJointCountDimension) {
    throw std::invalid_argument("joint count distribution needs 1 <= n <= " +
                                std::to_string(kMaxJointCountDimension) +
                                ", got " + std::to_string(n));
  }
  check_delta(delta);
  const double same = (1.0 - delta) / 2.0;  // cells (+,+) and (-,-)
  const double flip = delta / 2.0;          // cells (+,-) and (-,+)

  Eigen::MatrixXd current = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n + 1, n + 1);
  current(0, 0) = 1.0;
  for (int k = 0; k < n; ++k) {
    const Eigen::Index size = k + 1;
    auto prev = current.topLeftCorner(size, size);
    next.topLeftCorner(size + 1, size + 1).setZero();
    next.block(0, 0, size, size) += same * prev;
    next.block(1, 1, size, size) += same * prev;
    next.block(1, 0, size, size) += flip * prev;
    next.block(0, 1, size, size) += flip * prev;
    std::swap(current, next);
  }
  return JointCountDistribution(n, delta, std::move(current));
}

DenseFunction noise_operator(const DenseFunction& f, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("rho must be in [0, 1], got " + std::to_string(rho));
  }
  // Coordinatewise averaging: keep with prob (1+rho)/2, flip otherwise.
  const double keep = (1.0 + rho) / 2.0;
  const double flip = (1.0 - rho) / 2.0;
  Eigen::VectorXd values = f.values();
  const Eigen::Index size = values.size();
  for (Eigen::Index half = 1; half < size; half <<= 1) {
    for (Eigen::Index block = 0; block < size; block += 2 * half) {
      for (Eigen::Index j = block; j < block + half; ++j) {
        const double lo = values[j];
        const double hi = values[j + half];
        values[j] = keep * lo + flip * hi;
        values[j + half] = keep * hi + flip * lo;
      }
    }
  }
  return DenseFunction(f.n(), std::move(values));
}

double stability_exact(const DenseFunction& f, double delta) {
  check_delta(delta);
  const FourierSpectrum spectrum = fourier_transform(f);
  const double rho = 1.0 - 2.0 * delta;
  std::vector<double> damping(f.n() + 1, 1.0);
  for (int d = 1; d <= f.n(); ++d) damping[d] = damping[d - 1] * rho;
  double total = 0.0;
  for (std::uint32_t s = 0; s < spectrum.coeffs().size(); ++s) {
    total += damping[std::popcount(s)] * spectrum[s] * spectrum[s];
  }
  return total;
}

double stability_exact(const AnonymousFunction& f,
                       const JointCountDistribution& joint) {
  if (joint.n() != f.n()) {
    throw std::invalid_argument("joint distribution dimension mismatch");
  }
  return f.g().dot(joint.pmf() * f.g());
}

double stability_exact(const AnonymousFunction& f, double delta) {
  return stability_exact(f, joint_count_distribution(f.n(), delta));
}

double stability_exact(const AllocationRule& f, double delta) {
  return std::visit([delta](const auto& h) { return stability_exact(h, delta); }, f);
}

double sensitivity_exact(const DenseFunction& f, double delta) {
  require_boolean(f.is_boolean());
  const double ns = 2.0 * (f.mean() - stability_exact(f, delta));
  return std::clamp(ns, 0.0, 1.0);
}

double sensitivity_exact(const AnonymousFunction& f,
                         const JointCountDistribution& joint) {
  require_boolean(f.is_boolean());
  if (joint.n() != f.n()) {
    throw std::invalid_argument("joint distribution dimension mismatch");
  }
  // Off-diagonal disagreement mass; equals 2(E[f] - Stab) for Boolean g.
  const Eigen::MatrixXd& pmf = joint.pmf();
  double total = 0.0;
  for (int t = 0; t <= f.n(); ++t) {
    for (int s = 0; s <= f.n(); ++s) {
      if (f[s] != f[t]) total += pmf(s, t);
    }
  }
  return total;
}

double sensitivity_exact(const AnonymousFunction& f, double delta) {
  require_boolean(f.is_boolean());
  return sensitivity_exact(f, joint_count_distribution(f.n(), delta));
}

double sensitivity_exact(const AllocationRule& f, double delta) {
  return std::visit([delta](const auto& h) { return sensitivity_exact(h, delta); }, f);
}

Eigen::VectorXd threshold_sensitivities(const JointCountDistribution& joint) {
  const int n = joint.n();
  const Eigen::MatrixXd& pmf = joint.pmf();
  // crossing = P(m_x >= cut, m_y < cut); NS = 2 * crossing by exchangeability.
  Eigen::VectorXd ns(n + 2);
  double crossing = 0.0;
  ns[0] = 0.0;
  for (int cut = 0; cut <= n; ++cut) {
    // Move from cut to cut + 1: row `cut` leaves the upper set, column `cut`
    // joins the lower set.
    crossing -= pmf.row(cut).head(cut).sum();
    crossing += pmf.col(cut).tail(n - cut).sum();
    ns[cut + 1] = std::max(0.0, 2.0 * crossing);
  }
  ns[n + 1] = 0.0;
  return ns;
}

MonteCarloEstimate sensitivity_monte_carlo(const DenseFunction& f, double delta,
                                           std::uint64_t samples,
                                           std::uint64_t seed) {
  check_delta(delta);
  require_boolean(f.is_boolean());
  const int n = f.n();
  const std::uint32_t mask = static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
  return run_batches(samples, seed, [&](std::mt19937_64& rng, std::uint64_t count) {
    std::uint64_t hits = 0;
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto x = static_cast<std::uint32_t>(rng()) & mask;
      std::uint32_t flips = 0;
      for (int i = 0; i < n; ++i) {
        if (unit_uniform(rng) < delta) flips |= std::uint32_t{1} << i;
      }
      if (f[x] != f[x ^ flips]) ++hits;
    }
    return hits;
  });
}

MonteCarloEstimate sensitivity_monte_carlo(const AnonymousFunction& f,
                                           double delta, std::uint64_t samples,
                                           std::uint64_t seed) {
  check_delta(delta);
  require_boolean(f.is_boolean());
  const int n = f.n();
  return run_batches(samples, seed, [&](std::mt19937_64& rng, std::uint64_t count) {
    std::uint64_t hits = 0;
    std::binomial_distribution<int> count_x(n, 0.5);
    for (std::uint64_t k = 0; k < count; ++k) {
      const int mx = count_x(rng);
      int lost = 0;
      int gained = 0;
      if (delta > 0.0) {
        if (mx > 0) lost = std::binomial_distribution<int>(mx, delta)(rng);
        if (n - mx > 0) gained = std::binomial_distribution<int>(n - mx, delta)(rng);
      }
      const int my = mx - lost + gained;
      if (f[mx] != f[my]) ++hits;
    }
    return hits;
  });
}

MonteCarloEstimate sensitivity_monte_carlo(const AllocationRule& f,
                                           double delta, std::uint64_t samples,
                                           std::uint64_t seed) {
  return std::visit(
      [&](const auto& h) { return sensitivity_monte_carlo(h, delta, samples, seed); }, f);
}

}  // namespace noisemech

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

#include <bit>
#include <cmath>
#include <cstdlib>
#include <random>

#include <gtest/gtest.h>

#include "noisemech/function_spec.h"
#include "noisemech/hypercube.h"
#include "noisemech/noise.h"
#include "oracles.h"

namespace noisemech {
namespace {

DenseFunction dictator(int n) {
  return DenseFunction::tabulate(n, [](std::uint32_t x) { return (x & 1u) ? 1.0 : 0.0; });
}

TEST(NoiseOperator, Examples) {
  const DenseFunction c = noise_operator(DenseFunction::constant(3, 0.7), 0.4);
  for (std::uint32_t x = 0; x < 8; ++x) EXPECT_NEAR(c[x], 0.7, 1e-15);

  const DenseFunction d = noise_operator(dictator(2), 0.6);
  for (std::uint32_t x = 0; x < 4; ++x) {
    EXPECT_NEAR(d[x], 0.5 + 0.6 * coordinate(x, 0) / 2.0, 1e-15);
  }
  std::mt19937_64 rng(1);
  const DenseFunction f = testing::random_unit(4, rng);
  EXPECT_LE((noise_operator(f, 1.0).values() - f.values()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(noise_operator(f, 1.5), std::invalid_argument);
}

TEST(NoiseOperator, DampsSpectrumAndComposes) {
  std::mt19937_64 rng(2);
  const DenseFunction f = testing::random_unit(5, rng);
  const double rho = 0.7;
  const FourierSpectrum before = fourier_transform(f);
  const FourierSpectrum after = fourier_transform(noise_operator(f, rho));
  for (std::uint32_t s = 0; s < 32; ++s) {
    EXPECT_NEAR(after[s], std::pow(rho, std::popcount(s)) * before[s], 1e-14);
  }
  const DenseFunction twice = noise_operator(noise_operator(f, 0.9), 0.5);
  const DenseFunction once = noise_operator(f, 0.45);
  EXPECT_LE((twice.values() - once.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NoiseOperator, IsConditionalExpectation) {
  std::mt19937_64 rng(3);
  const DenseFunction f = testing::random_unit(3, rng);
  const double delta = 0.2;
  const DenseFunction t = noise_operator(f, 1.0 - 2.0 * delta);
  for (std::uint32_t x = 0; x < 8; ++x) {
    double direct = 0.0;
    for (std::uint32_t y = 0; y < 8; ++y) direct += testing::flip_weight(x, y, 3, delta) * f[y];
    EXPECT_NEAR(t[x], direct, 1e-14);
  }
}

TEST(Stability, Examples) {
  EXPECT_NEAR(stability_exact(DenseFunction::constant(4, 1.0), 0.3), 1.0, 1e-15);
  EXPECT_NEAR(stability_exact(dictator(1), 0.1), 0.45, 1e-15);
  const AnonymousFunction maj3 = AnonymousFunction::threshold(3, 0.0);
  EXPECT_NEAR(stability_exact(maj3, 0.1), 0.432, 1e-14);
  EXPECT_NEAR(stability_exact(maj3.to_dense(), 0.1), 0.432, 1e-14);
  EXPECT_NEAR(testing::pair_expectation(maj3.to_dense(), maj3.to_dense(), 0.1), 0.432, 1e-14);
}

TEST(Stability, FourierFormEqualsPairSum) {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 6; ++n) {
    const DenseFunction f = testing::random_unit(n, rng);
    for (const double delta : {0.0, 0.13, 0.5}) {
      EXPECT_NEAR(stability_exact(f, delta), testing::pair_expectation(f, f, delta), 1e-12);
    }
  }
}

TEST(Sensitivity, Examples) {
  std::mt19937_64 rng(5);
  const DenseFunction f = testing::random_boolean(4, rng);
  EXPECT_EQ(sensitivity_exact(f, 0.0), 0.0);
  for (int k = 1; k <= 9; ++k) {
    const double delta = 0.05 * k;
    EXPECT_NEAR(sensitivity_exact(dictator(3), delta), delta, 1e-12);
  }
  const AnonymousFunction maj3 = AnonymousFunction::threshold(3, 0.0);
  EXPECT_NEAR(sensitivity_exact(maj3, 0.1), 0.136, 1e-14);
  EXPECT_NEAR(testing::pair_sensitivity(maj3.to_dense(), 0.1), 0.136, 1e-14);
  EXPECT_THROW(sensitivity_exact(testing::random_unit(2, rng), 0.1), std::invalid_argument);
  EXPECT_THROW(sensitivity_exact(dictator(2), 0.6), std::invalid_argument);
}

TEST(Sensitivity, EnumerationAndComplement) {
  for (std::uint64_t id = 0; id < (1u << 16); id += 37) {
    const DenseFunction f = testing::truth_table(id, 4);
    const DenseFunction g = testing::truth_table(~id & 0xFFFFu, 4);
    const double ns = sensitivity_exact(f, 0.17);
    ASSERT_NEAR(ns, testing::pair_sensitivity(f, 0.17), 1e-12) << id;
    ASSERT_NEAR(ns, sensitivity_exact(g, 0.17), 1e-12) << id;
  }
}

TEST(Sensitivity, DenseAgreesWithAnonymous) {
  std::mt19937_64 rng(6);
  std::bernoulli_distribution coin(0.5);
  for (int n = 1; n <= 12; ++n) {
    Eigen::VectorXd g(n + 1);
    for (int m = 0; m <= n; ++m) g[m] = coin(rng) ? 1.0 : 0.0;
    const AnonymousFunction f(n, g);
    EXPECT_NEAR(sensitivity_exact(f, 0.23), sensitivity_exact(f.to_dense(), 0.23), 1e-10);
    EXPECT_NEAR(stability_exact(f, 0.23), stability_exact(f.to_dense(), 0.23), 1e-12);
  }
}

TEST(Sensitivity, NondecreasingInDeltaForThresholds) {
  for (int cut = 0; cut <= 16; ++cut) {
    const AnonymousFunction f = AnonymousFunction::count_threshold(15, cut);
    double previous = 0.0;
    for (int k = 0; k <= 50; ++k) {
      const double ns = sensitivity_exact(f, 0.01 * k);
      EXPECT_GE(ns, previous - 1e-15);
      previous = ns;
    }
  }
}

TEST(JointCount, Examples) {
  const JointCountDistribution one = joint_count_distribution(1, 0.1);
  EXPECT_NEAR(one(0, 0), 0.45, 1e-15);
  EXPECT_NEAR(one(0, 1), 0.05, 1e-15);
  EXPECT_NEAR(one(1, 0), 0.05, 1e-15);
  EXPECT_NEAR(one(1, 1), 0.45, 1e-15);

  const JointCountDistribution two = joint_count_distribution(2, 0.0);
  EXPECT_NEAR(two(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(two(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(two(2, 2), 0.25, 1e-15);
  EXPECT_EQ(two(0, 1), 0.0);

  EXPECT_THROW(joint_count_distribution(2001, 0.1), std::invalid_argument);
  EXPECT_THROW(joint_count_distribution(3, -0.1), std::invalid_argument);
}

TEST(JointCount, MatchesPairEnumeration) {
  const int n = 3;
  const double delta = 0.1;
  Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (std::uint32_t x = 0; x < 8; ++x) {
    for (std::uint32_t y = 0; y < 8; ++y) {
      direct(std::popcount(x), std::popcount(y)) += testing::flip_weight(x, y, n, delta) / 8.0;
    }
  }
  const JointCountDistribution joint = joint_count_distribution(n, delta);
  EXPECT_LE((joint.pmf() - direct).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(joint(3, 3), std::pow(0.45, 3), 1e-15);
}

TEST(JointCount, Invariants) {
  const JointCountDistribution joint = joint_count_distribution(200, 0.27);
  EXPECT_NEAR(joint.pmf().sum(), 1.0, 1e-10);
  EXPECT_GE(joint.pmf().minCoeff(), 0.0);
  EXPECT_LE((joint.pmf() - joint.pmf().transpose()).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::VectorXd rows = joint.pmf().rowwise().sum();
  for (int m = 0; m <= 200; ++m) EXPECT_NEAR(rows[m], testing::binomial_half(200, m), 1e-13);
}

TEST(JointCount, ThresholdTableMatchesSingleEvaluations) {
  const JointCountDistribution joint = joint_count_distribution(40, 0.15);
  const Eigen::VectorXd table = threshold_sensitivities(joint);
  ASSERT_EQ(table.size(), 42);
  for (int cut = 0; cut <= 41; ++cut) {
    EXPECT_NEAR(table[cut], sensitivity_exact(AnonymousFunction::count_threshold(40, cut), joint), 1e-13);
  }
  EXPECT_EQ(table[0], 0.0);
  EXPECT_EQ(table[41], 0.0);
}

TEST(MonteCarlo, ConstantIsExactZero) {
  const MonteCarloEstimate mc = sensitivity_monte_carlo(DenseFunction::constant(5, 0.0), 0.3, 100000, 9);
  EXPECT_EQ(mc.estimate, 0.0);
  EXPECT_EQ(mc.std_error, 0.0);
  EXPECT_EQ(mc.samples, 100000u);
}

TEST(MonteCarlo, DictatorAndMajority) {
  const MonteCarloEstimate d = sensitivity_monte_carlo(dictator(4), 0.2, 1'000'000, 42);
  EXPECT_LE(std::abs(d.estimate - 0.2), 5.0 * d.std_error);
  EXPECT_NEAR(d.std_error, std::sqrt(d.estimate * (1 - d.estimate) / 1e6), 1e-15);

  const AnonymousFunction maj = AnonymousFunction::threshold(101, 0.0);
  const MonteCarloEstimate m = sensitivity_monte_carlo(maj, 0.1, 1'000'000, 42);
  EXPECT_LE(std::abs(m.estimate - sensitivity_exact(maj, 0.1)), 5.0 * m.std_error);
}

TEST(MonteCarlo, SeedDeterminesResultAcrossThreadCounts) {
  const AnonymousFunction maj = AnonymousFunction::threshold(21, 0.0);
  ::setenv("NOISEMECH_THREADS", "1", 1);
  const MonteCarloEstimate serial = sensitivity_monte_carlo(maj, 0.1, 300000, 77);
  ::setenv("NOISEMECH_THREADS", "3", 1);
  const MonteCarloEstimate parallel = sensitivity_monte_carlo(maj, 0.1, 300000, 77);
  ::unsetenv("NOISEMECH_THREADS");
  EXPECT_EQ(serial.disagreements, parallel.disagreements);
  const MonteCarloEstimate other = sensitivity_monte_carlo(maj, 0.1, 300000, 78);
  EXPECT_NE(serial.disagreements, other.disagreements);
}

TEST(AllocationRuleOverloads, Dispatch) {
  const AllocationRule f = AnonymousFunction::threshold(5, 1.0);
  EXPECT_NEAR(sensitivity_exact(f, 0.2),
              sensitivity_exact(std::get<AnonymousFunction>(f).to_dense(), 0.2), 1e-12);
  EXPECT_NEAR(stability_exact(f, 0.2),
              stability_exact(std::get<AnonymousFunction>(f).to_dense(), 0.2), 1e-12);
}

}  // namespace
}  // namespace noisemech

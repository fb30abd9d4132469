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

#include "noisemech/binomial.h"

#include <cmath>
#include <stdexcept>

namespace noisemech {

Eigen::VectorXd log_factorials(int n) {
  if (n < 0) throw std::invalid_argument("log_factorials: n must be >= 0");
  Eigen::VectorXd table(n + 1);
  for (int k = 0; k <= n; ++k) table[k] = std::lgamma(static_cast<double>(k) + 1.0);
  return table;
}

Eigen::VectorXd binomial_half_pmf(int n) {
  const Eigen::VectorXd lf = log_factorials(n);
  const double log_total = n * std::log(2.0);
  Eigen::VectorXd pmf(n + 1);
  for (int m = 0; m <= n; ++m) {
    pmf[m] = std::exp(lf[n] - lf[m] - lf[n - m] - log_total);
  }
  return pmf;
}

Eigen::VectorXd binomial_pmf(int n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial_pmf: p must lie in [0, 1]");
  }
  Eigen::VectorXd pmf = Eigen::VectorXd::Zero(n + 1);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[n] = 1.0;
    return pmf;
  }
  const Eigen::VectorXd lf = log_factorials(n);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  for (int m = 0; m <= n; ++m) {
    pmf[m] = std::exp(lf[n] - lf[m] - lf[n - m] + m * lp + (n - m) * lq);
  }
  return pmf;
}

}  // namespace noisemech

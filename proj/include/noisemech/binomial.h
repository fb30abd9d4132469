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

#ifndef NOISEMECH_BINOMIAL_H_
#define NOISEMECH_BINOMIAL_H_

#include <Eigen/Dense>

namespace noisemech {

// Table of ln(k!) for k = 0..n.
Eigen::VectorXd log_factorials(int n);

// Masses C(n, m) / 2^n for m = 0..n. Computed in log space so that n can
// reach the anonymous-function limit without overflow.
Eigen::VectorXd binomial_half_pmf(int n);

// Masses of Binomial(n, p) for m = 0..n, also in log space.
Eigen::VectorXd binomial_pmf(int n, double p);

}  // namespace noisemech

#endif  // NOISEMECH_BINOMIAL_H_

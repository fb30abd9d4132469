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

// Command-line front end. Exit codes: 0 success, 1 infeasible target or
// failed verification, 2 usage error.

#ifndef NOISEMECH_CLI_H_
#define NOISEMECH_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisemech/mechanism.h"
#include "noisemech/optimize.h"

namespace noisemech::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OptimizeMode { kRevenueMax, kSurplusMax, kMinBias, kNsMin };

struct RunConfig {
  std::string command;
  MechanismParams params;
  bool has_delta = false;
  std::optional<int> n;
  std::optional<std::string> spec_path;
  std::optional<std::string> out_path;
  std::optional<double> r;
  std::vector<double> r_grid;
  std::vector<double> delta_grid;
  Regime regime = Regime::kFinite;
  OptimizeMode mode = OptimizeMode::kRevenueMax;
  OracleScope scope = OracleScope::kAnonymous;
  std::string suite;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  std::optional<double> eps;
  // Set when the arguments asked for --help; run() prints it.
  std::string help_text;
};

// "start:stop:step" (inclusive of stop within 1e-12), or a comma list.
std::vector<double> parse_grid(const std::string& text);

// args excludes the program name. Throws UsageError.
RunConfig parse_args(const std::vector<std::string>& args);

// Executes a validated config. Results go to `out` (or to --out when given),
// diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run with usage errors mapped to exit code 2.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noisemech::cli

#endif  // NOISEMECH_CLI_H_

/*
 * Copyright 2026 The kpath Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KPATH_CLI_HPP_
#define KPATH_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "kpath/config.hpp"
#include "kpath/diagnostics.hpp"

namespace kpath {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

// Each command writes its artifacts under cfg.out_dir and a short summary to
// `log`. They throw on errors; run_command maps exceptions to exit codes.
int cmd_greedy(const RunConfig& cfg, std::ostream& log);
int cmd_basis(const RunConfig& cfg, std::ostream& log);
int cmd_sample(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_gap(const RunConfig& cfg, std::ostream& log);
int cmd_mercer(const RunConfig& cfg, std::ostream& log);

/// Builds the basis described by cfg (P-greedy Newton or Nystrom KL), or
/// imports cfg.basis_file when set.
ExpansionBasis obtain_basis(const RunConfig& cfg);

/// Diagnostics suites: "default", "gap", "basis", "all".
DiagnosticsReport run_suite(const RunConfig& cfg, const std::string& suite);

/// Runs a command by name, mapping exceptions to exit codes.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log,
                std::ostream& err);

/// Full command-line entry point.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpath

#endif  // KPATH_CLI_HPP_

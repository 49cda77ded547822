// Copyright 2026 The sitopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>

#include "sitopt/report.hpp"

namespace sitopt {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInfeasible = 1,  // no admissible control / numerical failure
  kExitUsage = 2,       // bad flags, parameters or files
};

/// Maps a library error to an exit code.
int exit_code_for(ErrorCode code);

/// "off", "const:V" or "pulse:A:period:width" on [0, T].
ControlSchedule parse_control_spec(const std::string& spec, double T);

/// Max over t of |F_reduced - F_full|, relative to max F_full.
double relative_sup_gap(const ReducedTrajectory& reduced, const FullTrajectory& full,
                        double step = 0.05);

/// Entry point of the `sitopt` tool. Diagnostics go to `err`, summaries to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sitopt

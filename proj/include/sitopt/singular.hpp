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

#include <optional>
#include <vector>

#include "sitopt/integrator.hpp"

namespace sitopt {

/// Release rate that keeps the switching function identically zero:
///   (f_Ms f_F + delta_s Ms f_MsMs - f f_MsF) / f_MsMs  at (F, Ms).
/// Requires F > 0. The value may be negative away from optimal arcs.
double singular_rate(const Params& p, double F, double Ms);

struct ClosedLoopOptions {
  Tolerance tol{};
  /// Spacing of the stored rate samples on [0, tau1].
  double sample_step = 0.01;
  /// Rates above this bound set `bound_exceeded` (never clamped).
  std::optional<double> upper_bound;
  /// How many times the search window may double before NoMinimum.
  int max_doublings = 4;
};

/// Singular feedback applied on (0, tau1) from the persistence equilibrium,
/// then released; tau2 is where the female population bottoms out.
struct ClosedLoopRun {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double F_min = 0.0;
  ReducedTrajectory trajectory;
  std::vector<double> u_times;   // on [0, tau1]
  std::vector<double> u_values;  // clamped to >= 0
  double raw_min_rate = 0.0;     // before clamping
  double max_rate = 0.0;
  bool negative_rate = false;
  bool bound_exceeded = false;
  double window = 0.0;           // integration horizon actually used
};

/// Integrates the closed loop on [0, t_end] without searching for the
/// minimum. tau1 may exceed t_end (feedback never released).
ReducedTrajectory closed_loop_trajectory(const Params& p, double tau1, double t_end,
                                         Tolerance tol = {});

/// Runs the closed loop and locates tau2 as the first - to + sign change of
/// F' = f(F, Ms) after t = 0. The window [0, t_cap] doubles up to
/// `max_doublings` times before NoMinimum is raised.
ClosedLoopRun integrate_closed_loop(const Params& p, double tau1, double t_cap,
                                    const ClosedLoopOptions& opt = {});

}  // namespace sitopt

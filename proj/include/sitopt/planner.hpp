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

#include "sitopt/singular.hpp"

namespace sitopt {

enum class Objective { kL1, kL2, kTerminalBudget };

const char* to_string(Objective o);

/// Release-planning problem: reach F(T) <= epsilon from the persistence
/// equilibrium with 0 <= u <= U_bar.
struct ProblemSpec {
  double T = 200.0;
  double U_bar = 5000.0;
  double epsilon = 0.0;
  ModelKind model = ModelKind::kReduced;
  Objective objective = Objective::kL1;
  std::optional<double> budget;  // only for kTerminalBudget

  /// Throws InvalidParameter unless 0 < epsilon < F_bar, U_bar > 0, T > 0.
  void validate(const Params& p) const;
};

struct PlanOptions {
  Tolerance tol{};
  int max_iterations = 60;
  double residual_rel = 1e-6;  // early exit on |psi - eps| <= residual_rel * eps
  double sample_step = 0.01;
  /// Interior points evaluated per iteration; 1 is plain bisection, larger
  /// values run a k-section whose psi evaluations are OpenMP-parallel.
  int batch_width = 1;
};

struct BracketStep {
  double tau_lo, tau_hi;
  double psi_lo, psi_hi;
};

struct PlanDiagnostics {
  bool negative_rate = false;
  bool bound_exceeded = false;
  double residual = 0.0;       // |F_min - eps|
  double max_rate = 0.0;
  double min_rate = 0.0;       // smallest singular rate on the arc
  std::vector<BracketStep> history;
};

struct PlanResult {
  ControlSchedule schedule;
  double t0 = 0.0;
  double t1 = 0.0;
  double J = 0.0;
  double F_terminal = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  int iterations = 0;
  PlanDiagnostics diagnostics;
  /// Open-loop replay of `schedule` on [0, T].
  ReducedTrajectory trajectory;

  /// Length of the active window T - t0.
  double active_duration() const { return tau2; }
};

/// Minimum female level reached by the closed loop released at tau1.
double psi(const Params& p, double tau1, double t_cap, const ClosedLoopOptions& opt = {});

/// psi at many tau1 values; the OpenMP kernel and its serial reference.
std::vector<double> psi_batch(const Params& p, const std::vector<double>& taus, double t_cap,
                              const ClosedLoopOptions& opt = {});
std::vector<double> psi_batch_serial(const Params& p, const std::vector<double>& taus,
                                     double t_cap, const ClosedLoopOptions& opt = {});

/// Time-shifts a closed-loop run so that its minimum lands at T:
/// Off on (0, T - tau2), the sampled singular rate on [T - tau2, T - tau2 + tau1],
/// Off afterwards. Throws ShiftOverflow if tau2 > T.
ControlSchedule assemble_control(const ClosedLoopRun& run, double T);

/// Dichotomy on the singular-arc duration followed by shift assembly.
/// Reduced model, L1 objective only.
PlanResult plan_release(const Params& p, const ProblemSpec& spec, const PlanOptions& opt = {});

/// First time a constant release at U_bar brings F down to epsilon.
double minimal_time(const Params& p, double U_bar, double epsilon, Tolerance tol = {});

}  // namespace sitopt

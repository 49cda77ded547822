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
#include <string>
#include <vector>

#include "sitopt/adjoint.hpp"
#include "sitopt/planner.hpp"

namespace sitopt {

enum class CellClass { kOff, kInterior, kUpper };

const char* to_string(CellClass c);

struct Arc {
  CellClass kind;
  double t_start;
  double t_end;
};

/// Cellwise check of the first-order conditions against the switching function.
struct StructureReport {
  std::vector<CellClass> classes;
  std::vector<double> sigma;  // switching values normalized by their range
  std::vector<Arc> arcs;
  std::string pattern;        // e.g. "Off-Singular-Off"
  double t0 = 0.0;            // start of the first non-off arc (T when none)
  double t1 = 0.0;            // end of the last non-off arc
  double lambda = 0.0;
  bool trailing_off = false;
  bool expects_trailing_off = true;  // false for L2, whose control only vanishes at T
  bool lambda_positive = false;
  bool constraint_active = false;
  std::vector<std::size_t> offending;

  /// Sign conditions hold on every cell and the control ends with an off arc.
  /// Sign conditions hold, the multiplier is positive and the constraint binds.
  bool consistent() const {
    return offending.empty() && (trailing_off || !expects_trailing_off) && lambda_positive &&
           constraint_active;
  }
};

struct IterationRecord {
  int outer;
  int inner;
  double objective;
  double F_terminal;
  double lambda;
  double rho;
  double stationarity;
};

struct OptimizationResult {
  ModelKind model = ModelKind::kReduced;
  Objective objective = Objective::kL1;
  double T = 0.0;
  double U_bar = 0.0;
  double epsilon = 0.0;
  double budget = 0.0;           // kTerminalBudget only
  std::vector<double> u;         // N equal cells on [0, T]
  std::vector<double> gradient;  // dF(T)/du per cell (integral of R or S)
  double J = 0.0;                // integral of u (L1, budget) or of u^2 (L2)
  double F_terminal = 0.0;
  double lambda = 0.0;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double stationarity = 0.0;
  std::vector<IterationRecord> history;
  StructureReport structure;

  double cell_width() const { return T / static_cast<double>(u.size()); }
  ControlSchedule schedule() const { return ControlSchedule::piecewise_constant(T, u); }
};

struct DirectOptions {
  std::size_t cells = 300;
  Tolerance tol{};
  int max_outer = 20;
  int max_inner = 3000;
  double stationarity_tol = 1e-6;  // projected-gradient norm, relative
  double feasibility_tol = 1e-6;   // |F(T) - eps| relative to eps
  double classify_tol = 1e-3;
  std::optional<std::vector<double>> initial;
};

/// Minimizes the L1 or L2 release cost subject to F(T) <= epsilon and
/// 0 <= u <= U_bar on piecewise-constant cells. Does not throw on iteration
/// exhaustion: the best iterate is returned with converged = false.
/// Throws Infeasible when even u = U_bar on all of [0, T] misses epsilon.
OptimizationResult solve_direct(const Params& p, const ProblemSpec& spec,
                                const DirectOptions& opt = {});

/// Minimizes F(T) subject to 0 <= u <= U_bar and integral u <= budget.
OptimizationResult solve_budget_dual(const Params& p, ModelKind model, double T, double U_bar,
                                     double budget, const DirectOptions& opt = {});

/// Euclidean projection onto {0 <= x <= hi, sum(x) <= total}.
void project_box_budget(std::vector<double>& x, double hi, std::optional<double> total);

/// Classifies cells and checks the sign conditions of the switching function
/// 1 + lambda*R (L1, budget) or u + lambda*R (L2), R being the cell average of
/// the control sensitivity. sigma is normalized by its range (L1) or by the
/// largest control value (L2).
StructureReport analyze_switching(const OptimizationResult& result, double tol = 1e-3);

/// Same, with sensitivities recomputed from a given adjoint. Throws
/// StructureMismatch listing offending cells when the report is inconsistent.
template <class State>
StructureReport verify_switching(const OptimizationResult& result,
                                 const AdjointTrajectory<State>& adjoint, double tol = 1e-3);

/// Control value at T read off the cell grid: the cubic whose averages over
/// the last four cells match the cell values, evaluated at T and floored at 0.
/// The last cell value itself is an average over [T - dt, T] and overstates
/// u(T) by about |u'| dt / 2, which is large where u drops steeply.
double terminal_rate(const OptimizationResult& result);

/// Planning for any problem. The reduced L1 problem goes through the
/// dichotomy planner (wrapped on opt.cells cells); everything else through
/// solve_direct, since the dichotomy is only established for the reduced
/// model -- `warning` then receives a note saying so.
OptimizationResult plan_any(const Params& p, const ProblemSpec& spec, std::string* warning = nullptr,
                            const DirectOptions& opt = {});

/// Cell averages of an arbitrary schedule on n equal cells.
std::vector<double> cell_averages(const ControlSchedule& u, std::size_t n);

/// Wraps a planner output as an OptimizationResult on n cells; the
/// multiplier is estimated from the sensitivity on interior cells.
OptimizationResult from_plan(const Params& p, const ProblemSpec& spec, const PlanResult& plan,
                             std::size_t n, Tolerance tol = {});

}  // namespace sitopt

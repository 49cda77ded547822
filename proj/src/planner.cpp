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

#include "sitopt/planner.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

namespace sitopt {

const char* to_string(Objective o) {
  switch (o) {
    case Objective::kL1: return "l1";
    case Objective::kL2: return "l2";
    case Objective::kTerminalBudget: return "budget";
  }
  return "unknown";
}

void ProblemSpec::validate(const Params& p) const {
  const double F_bar = derive_quantities(p).F_bar;
  if (!(T > 0.0)) throw Error(ErrorCode::kInvalidParameter, "T must be positive");
  if (!(U_bar > 0.0)) throw Error(ErrorCode::kInvalidParameter, "U_bar must be positive");
  if (!(epsilon > 0.0 && epsilon < F_bar)) {
    throw Error(ErrorCode::kInvalidParameter,
                "epsilon must lie in (0, F_bar = " + std::to_string(F_bar) + ")");
  }
  if (objective == Objective::kTerminalBudget && !(budget && *budget >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "budget objective needs a non-negative budget");
  }
}

double psi(const Params& p, double tau1, double t_cap, const ClosedLoopOptions& opt) {
  return integrate_closed_loop(p, tau1, t_cap, opt).F_min;
}

std::vector<double> psi_batch_serial(const Params& p, const std::vector<double>& taus,
                                     double t_cap, const ClosedLoopOptions& opt) {
  std::vector<double> out(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) out[i] = psi(p, taus[i], t_cap, opt);
  return out;
}

std::vector<double> psi_batch(const Params& p, const std::vector<double>& taus, double t_cap,
                              const ClosedLoopOptions& opt) {
  std::vector<double> out(taus.size());
  std::exception_ptr failure;
  const long n = static_cast<long>(taus.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = psi(p, taus[i], t_cap, opt);
    } catch (...) {
#pragma omp critical(sitopt_psi_batch)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ControlSchedule assemble_control(const ClosedLoopRun& run, double T) {
  if (run.tau2 > T) {
    throw Error(ErrorCode::kShiftOverflow, "tau2 = " + std::to_string(run.tau2) +
                                               " exceeds the horizon T = " + std::to_string(T));
  }
  const double shift = T - run.tau2;
  std::vector<Segment> segs;
  if (shift > 0.0) segs.push_back(Segment{0.0, shift, OffSegment{}});
  double end = shift;
  if (run.tau1 > 0.0 && !run.u_times.empty()) {
    SampledSegment s;
    s.t.reserve(run.u_times.size());
    for (double t : run.u_times) s.t.push_back(shift + t);
    s.rate = run.u_values;
    end = s.t.back();
    segs.push_back(Segment{shift, end, std::move(s)});
  }
  if (end < T) segs.push_back(Segment{end, T, OffSegment{}});
  return ControlSchedule(std::move(segs));
}

PlanResult plan_release(const Params& p, const ProblemSpec& spec, const PlanOptions& opt) {
  spec.validate(p);
  if (spec.model != ModelKind::kReduced || spec.objective != Objective::kL1) {
    throw Error(ErrorCode::kInvalidParameter,
                "the dichotomy planner solves the reduced L1 problem only; use solve_direct");
  }
  const double eps = spec.epsilon;
  const double T = spec.T;
  const double t_cap = 4.0 * T;

  ClosedLoopOptions cl;
  cl.tol = opt.tol;
  cl.sample_step = opt.sample_step;
  cl.upper_bound = spec.U_bar;

  PlanDiagnostics diag;
  ClosedLoopRun best = integrate_closed_loop(p, T, t_cap, cl);
  if (best.F_min > eps) {
    throw Error(ErrorCode::kInfeasibleHorizon,
                "even feedback on the whole horizon only reaches F = " +
                    std::to_string(best.F_min) + " > epsilon = " + std::to_string(eps));
  }

  double lo = 0.0, hi = T;
  double psi_lo = derive_quantities(p).F_bar, psi_hi = best.F_min;
  const int width = std::max(1, opt.batch_width);
  int iterations = 0;
  bool converged = std::abs(best.F_min - eps) <= opt.residual_rel * eps;

  while (!converged && iterations < opt.max_iterations) {
    ++iterations;
    std::vector<double> taus(static_cast<std::size_t>(width));
    for (int k = 0; k < width; ++k) {
      taus[static_cast<std::size_t>(k)] = lo + (hi - lo) * (k + 1) / (width + 1);
    }
    std::vector<ClosedLoopRun> runs;
    runs.reserve(taus.size());
    if (width == 1) {
      runs.push_back(integrate_closed_loop(p, taus[0], t_cap, cl));
    } else {
      std::vector<std::optional<ClosedLoopRun>> slots(taus.size());
      std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
      for (long k = 0; k < static_cast<long>(taus.size()); ++k) {
        try {
          slots[static_cast<std::size_t>(k)] = integrate_closed_loop(p, taus[static_cast<std::size_t>(k)], t_cap, cl);
        } catch (...) {
#pragma omp critical(sitopt_plan_batch)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      for (auto& s : slots) runs.push_back(std::move(*s));
    }

    // psi is decreasing: the new bracket is the first run that dips below eps
    // together with its left neighbour.
    std::size_t first_below = runs.size();
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (runs[k].F_min < eps) {
        first_below = k;
        break;
      }
    }
    for (const ClosedLoopRun& r : runs) {
      if (std::abs(r.F_min - eps) <= opt.residual_rel * eps) {
        best = r;
        converged = true;
        break;
      }
    }
    if (first_below < runs.size()) {
      hi = runs[first_below].tau1;
      psi_hi = runs[first_below].F_min;
      if (!converged) best = runs[first_below];
    }
    if (first_below > 0) {
      lo = runs[first_below - 1].tau1;
      psi_lo = runs[first_below - 1].F_min;
    }
    diag.history.push_back({lo, hi, psi_lo, psi_hi});
  }

  if (best.negative_rate) {
    throw Error(ErrorCode::kStructureViolation,
                "singular rate turned negative on (0, tau1); the optimal structure does not apply");
  }
  if (best.tau2 > T) {
    throw Error(ErrorCode::kInfeasibleHorizon,
                "the singular arc needs tau2 = " + std::to_string(best.tau2) +
                    " days, longer than T = " + std::to_string(T));
  }

  ControlSchedule schedule = assemble_control(best, T);
  ReducedTrajectory replay = integrate(p, reduced_equilibrium(p), schedule, opt.tol);

  diag.negative_rate = best.negative_rate;
  diag.bound_exceeded = best.bound_exceeded;
  diag.residual = std::abs(best.F_min - eps);
  diag.max_rate = best.max_rate;
  diag.min_rate = *std::min_element(best.u_values.begin(), best.u_values.end());

  PlanResult result{std::move(schedule), T - best.tau2, T - best.tau2 + best.tau1, 0.0,
                    replay.terminal().F, best.tau1, best.tau2, iterations, std::move(diag),
                    std::move(replay)};
  result.J = result.schedule.integral();
  return result;
}

double minimal_time(const Params& p, double U_bar, double epsilon, Tolerance tol) {
  const double F_bar = derive_quantities(p).F_bar;
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidParameter, "epsilon must be positive");
  if (epsilon >= F_bar) return 0.0;
  const double cap = 100.0 / p.delta_F() * std::log(F_bar / epsilon);
  const ReducedTrajectory traj =
      integrate(p, reduced_equilibrium(p), ControlSchedule::constant(cap, U_bar), tol);
  const auto ev = locate_crossing(
      traj.solution(), [epsilon](const Vec<2>& y) { return y[0] - epsilon; }, Crossing::kFalling);
  if (!ev) {
    throw Error(ErrorCode::kNotReached, "constant release " + std::to_string(U_bar) +
                                            " never brings F below " + std::to_string(epsilon));
  }
  return ev->t;
}

}  // namespace sitopt

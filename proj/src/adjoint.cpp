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

#include "sitopt/adjoint.hpp"

namespace sitopt {
namespace {

std::vector<double> reversed_breakpoints(const ControlSchedule& u, double T) {
  std::vector<double> out;
  for (double b : u.boundaries()) {
    if (b > 0.0 && b < T) out.push_back(T - b);
  }
  return out;
}

}  // namespace

ReducedAdjoint adjoint_solve(const Params& p, const ReducedTrajectory& forward, Tolerance tol) {
  const double T = forward.t_end();
  OdeOptions<3> opt;
  opt.tol = tol;
  opt.scale = {1.0, 1.0, 1.0};
  opt.breakpoints = reversed_breakpoints(forward.control(), T);
  const double ds = p.delta_s();
  // d/ds (Q, R) = A^T (Q, R) with A the Jacobian of (f, u - delta_s Ms).
  auto rhs = [&](double s, const Vec<3>& z, const Interval&) {
    const ReducedState x = forward.sample(std::clamp(T - s, 0.0, T));
    const Jacobian2 J = jacobian_reduced(p, x);
    return Vec<3>{J[0][0] * z[0], J[0][1] * z[0] - ds * z[1], z[1]};
  };
  return ReducedAdjoint(integrate_ode<3>(rhs, Vec<3>{1.0, 0.0, 0.0}, 0.0, T, opt), T);
}

FullAdjoint adjoint_solve(const Params& p, const FullTrajectory& forward, Tolerance tol) {
  const double T = forward.t_end();
  OdeOptions<5> opt;
  opt.tol = tol;
  opt.scale = {1.0, 1.0, 1.0, 1.0, 1.0};
  opt.breakpoints = reversed_breakpoints(forward.control(), T);
  auto rhs = [&](double s, const Vec<5>& z, const Interval&) {
    const FullState x = forward.sample(std::clamp(T - s, 0.0, T));
    const Jacobian4 J = jacobian_full(p, x);
    Vec<5> dz{};
    for (std::size_t j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < 4; ++i) acc += J[i][j] * z[i];
      dz[j] = acc;
    }
    dz[4] = z[3];
    return dz;
  };
  return FullAdjoint(integrate_ode<5>(rhs, Vec<5>{0.0, 0.0, 1.0, 0.0, 0.0}, 0.0, T, opt), T);
}

namespace {

template <class State>
TerminalSensitivity sensitivity_for(const Params& p, const State& s0,
                                    const std::vector<double>& cells, double T, Tolerance tol) {
  const ControlSchedule u = ControlSchedule::piecewise_constant(T, cells);
  const Trajectory<State> fwd = integrate(p, s0, u, tol);
  const AdjointTrajectory<State> adj = adjoint_solve(p, fwd, tol);
  TerminalSensitivity out{fwd.terminal().F, std::vector<double>(cells.size())};
  const std::vector<double> b = u.boundaries();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.gradient[i] = adj.sensitivity_integral(b[i], b[i + 1]);
  }
  return out;
}

}  // namespace

TerminalSensitivity gradient_terminal(const Params& p, ModelKind model,
                                      const std::vector<double>& cells, double T,
                                      Tolerance tol) {
  if (model == ModelKind::kReduced) {
    return sensitivity_for(p, reduced_equilibrium(p), cells, T, tol);
  }
  return sensitivity_for(p, full_equilibrium(p), cells, T, tol);
}

double terminal_females(const Params& p, ModelKind model, const std::vector<double>& cells,
                        double T, Tolerance tol) {
  const ControlSchedule u = ControlSchedule::piecewise_constant(T, cells);
  if (model == ModelKind::kReduced) return integrate(p, reduced_equilibrium(p), u, tol).terminal().F;
  return integrate(p, full_equilibrium(p), u, tol).terminal().F;
}

}  // namespace sitopt

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

#include "sitopt/singular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sitopt {

double singular_rate(const Params& p, double F, double Ms) {
  if (!(F > 0.0)) {
    throw Error(ErrorCode::kDomainError, "singular_rate requires F > 0");
  }
  const Partials d = f_partials(p, F, Ms);
  return (d.df_dMs * d.df_dF + p.delta_s() * Ms * d.d2f_dMs2 - d.f * d.d2f_dMsdF) / d.d2f_dMs2;
}

namespace {

DenseSolution<2> run_closed_loop(const Params& p, double tau1, double t_end, Tolerance tol) {
  const DerivedQuantities d = derive_quantities(p);
  OdeOptions<2> opt;
  opt.tol = tol;
  opt.scale = {d.F_bar, d.F_bar};
  if (tau1 > 0.0 && tau1 < t_end) opt.breakpoints = {tau1};
  const bool feedback_everywhere = tau1 >= t_end;
  auto rhs = [&](double, const Vec<2>& y, const Interval& iv) {
    double u = 0.0;
    if (tau1 > 0.0 && (feedback_everywhere || iv.index == 0) && y[0] > 0.0) {
      u = std::max(0.0, singular_rate(p, y[0], y[1]));
    }
    return rhs_reduced(p, ReducedState::from_array(y), u);
  };
  return integrate_ode<2>(rhs, reduced_equilibrium(p).to_array(), 0.0, t_end, opt);
}

}  // namespace

ReducedTrajectory closed_loop_trajectory(const Params& p, double tau1, double t_end,
                                         Tolerance tol) {
  DenseSolution<2> sol = run_closed_loop(p, tau1, t_end, tol);
  // The applied control is feedback; the attached schedule records it at the
  // mesh points.
  const double end = std::min(tau1, t_end);
  std::vector<Segment> segs;
  if (end > 0.0) {
    SampledSegment s;
    for (std::size_t i = 0; i < sol.mesh().size(); ++i) {
      const double t = sol.mesh()[i];
      if (t > end) break;
      const Vec<2>& y = sol.states()[i];
      s.t.push_back(t);
      s.rate.push_back(y[0] > 0.0 ? std::max(0.0, singular_rate(p, y[0], y[1])) : 0.0);
    }
    if (s.t.back() < end) {
      const Vec<2> y = sol.sample(end);
      s.t.push_back(end);
      s.rate.push_back(std::max(0.0, singular_rate(p, y[0], y[1])));
    }
    segs.push_back(Segment{0.0, end, std::move(s)});
  }
  if (end < t_end) segs.push_back(Segment{end, t_end, OffSegment{}});
  return ReducedTrajectory(std::move(sol), ControlSchedule(std::move(segs)));
}

ClosedLoopRun integrate_closed_loop(const Params& p, double tau1, double t_cap,
                                    const ClosedLoopOptions& opt) {
  if (!(tau1 >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "tau1 must be non-negative");
  }
  if (!(t_cap >= tau1) || !(t_cap > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "t_cap must be positive and at least tau1");
  }
  const double F_bar = derive_quantities(p).F_bar;

  if (tau1 == 0.0) {
    ClosedLoopRun run{0.0, 0.0, F_bar, closed_loop_trajectory(p, 0.0, t_cap, opt.tol), {}, {}};
    run.window = t_cap;
    return run;
  }

  double window = t_cap;
  for (int attempt = 0; attempt <= opt.max_doublings; ++attempt, window *= 2.0) {
    ReducedTrajectory traj = closed_loop_trajectory(p, tau1, window, opt.tol);
    auto g = [&p](const Vec<2>& y) { return female_rate(p, y[0], y[1]); };
    // Ignore the stationary start where F' is zero up to rounding.
    const auto ev = locate_crossing(traj.solution(), g, Crossing::kRising);
    if (!ev) continue;

    ClosedLoopRun run{tau1, ev->t, ev->state[0], std::move(traj), {}, {}};
    run.window = window;
    const std::size_t n =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tau1 / opt.sample_step)));
    run.u_times.reserve(n + 1);
    run.u_values.reserve(n + 1);
    run.raw_min_rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = i == n ? tau1 : tau1 * static_cast<double>(i) / static_cast<double>(n);
      const Vec<2> y = run.trajectory.solution().sample(t);
      const double raw = singular_rate(p, y[0], y[1]);
      run.raw_min_rate = std::min(run.raw_min_rate, raw);
      run.u_times.push_back(t);
      run.u_values.push_back(std::max(0.0, raw));
    }
    run.max_rate = *std::max_element(run.u_values.begin(), run.u_values.end());
    run.negative_rate = run.raw_min_rate < 0.0;
    run.bound_exceeded = opt.upper_bound && run.max_rate > *opt.upper_bound;
    return run;
  }
  throw Error(ErrorCode::kNoMinimum, "female population still decreasing at t = " +
                                         std::to_string(window / 2.0) +
                                         " for tau1 = " + std::to_string(tau1));
}

}  // namespace sitopt

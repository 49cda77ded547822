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

#include "sitopt/integrator.hpp"

#include <string>

namespace sitopt {
namespace {

constexpr double kInvariantSlack = 1e-6;

std::vector<double> interior_boundaries(const ControlSchedule& u) {
  std::vector<double> b = u.boundaries();
  return std::vector<double>(b.begin() + 1, b.end() - 1);
}

double schedule_value(const ControlSchedule& u, double t, const Interval& iv) {
  // Breakpoint intervals are nested inside schedule segments; the midpoint
  // identifies the segment without boundary ambiguity.
  return u.value_in(u.segment_index(0.5 * (iv.lo + iv.hi)), t);
}

[[noreturn]] void breach(const char* what, double t, double value) {
  throw Error(ErrorCode::kInvariantBreach, std::string(what) + " = " + std::to_string(value) +
                                               " at t = " + std::to_string(t));
}

}  // namespace

ReducedState reduced_equilibrium(const Params& p) {
  return {derive_quantities(p).F_bar, 0.0};
}

FullState full_equilibrium(const Params& p) {
  const DerivedQuantities d = derive_quantities(p);
  return {d.E_bar, d.M_bar, d.F_bar, 0.0};
}

ReducedTrajectory integrate(const Params& p, const ReducedState& s0, const ControlSchedule& u,
                            double t_begin, double t_end, Tolerance tol) {
  const DerivedQuantities d = derive_quantities(p);
  const double max_ms = std::max(u.max_rate() / p.delta_s(), d.F_bar);
  OdeOptions<2> opt;
  opt.tol = tol;
  opt.scale = {d.F_bar, max_ms};
  opt.breakpoints = interior_boundaries(u);

  const bool inside = s0.F > 0.0 && s0.F <= d.F_bar && s0.Ms >= 0.0;
  const double slack = kInvariantSlack * d.F_bar;
  if (inside) {
    opt.on_step = [&](double t, const Vec<2>& y) {
      if (y[0] < -slack || y[0] > d.F_bar + slack) breach("F", t, y[0]);
      if (y[1] < -kInvariantSlack * max_ms) breach("Ms", t, y[1]);
    };
  }
  auto rhs = [&](double t, const Vec<2>& y, const Interval& iv) {
    return rhs_reduced(p, ReducedState::from_array(y), schedule_value(u, t, iv));
  };
  return ReducedTrajectory(integrate_ode<2>(rhs, s0.to_array(), t_begin, t_end, opt), u);
}

FullTrajectory integrate(const Params& p, const FullState& s0, const ControlSchedule& u,
                         double t_begin, double t_end, Tolerance tol) {
  const DerivedQuantities d = derive_quantities(p);
  const double max_ms = std::max(u.max_rate() / p.delta_s(), d.F_bar);
  OdeOptions<4> opt;
  opt.tol = tol;
  opt.scale = {d.E_bar, d.M_bar, d.F_bar, max_ms};
  opt.breakpoints = interior_boundaries(u);

  const bool inside = s0.E > 0.0 && s0.E <= d.E_bar && s0.M > 0.0 && s0.M <= d.M_bar &&
                      s0.F > 0.0 && s0.F <= d.F_bar && s0.Ms >= 0.0;
  if (inside) {
    opt.on_step = [&](double t, const Vec<4>& y) {
      const std::array<double, 3> bar{d.E_bar, d.M_bar, d.F_bar};
      const char* names[] = {"E", "M", "F"};
      for (std::size_t i = 0; i < 3; ++i) {
        const double slack = kInvariantSlack * bar[i];
        if (y[i] < -slack || y[i] > bar[i] + slack) breach(names[i], t, y[i]);
      }
      if (y[3] < -kInvariantSlack * max_ms) breach("Ms", t, y[3]);
    };
  }
  auto rhs = [&](double t, const Vec<4>& y, const Interval& iv) {
    return rhs_full(p, FullState::from_array(y), schedule_value(u, t, iv));
  };
  return FullTrajectory(integrate_ode<4>(rhs, s0.to_array(), t_begin, t_end, opt), u);
}

}  // namespace sitopt

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

#include <functional>
#include <optional>

#include "sitopt/model.hpp"
#include "sitopt/ode.hpp"
#include "sitopt/schedule.hpp"

namespace sitopt {

template <class State>
struct StateTraits;

template <>
struct StateTraits<ReducedState> {
  static constexpr std::size_t kDim = 2;
  static constexpr ModelKind kKind = ModelKind::kReduced;
};

template <>
struct StateTraits<FullState> {
  static constexpr std::size_t kDim = 4;
  static constexpr ModelKind kKind = ModelKind::kFull;
};

/// Integrated model trajectory under an open-loop schedule.
template <class State>
class Trajectory {
 public:
  static constexpr std::size_t kDim = StateTraits<State>::kDim;

  Trajectory(DenseSolution<kDim> solution, ControlSchedule control)
      : solution_(std::move(solution)), control_(std::move(control)) {}

  ModelKind kind() const { return StateTraits<State>::kKind; }
  State sample(double t) const { return State::from_array(solution_.sample(t)); }
  State terminal() const { return State::from_array(solution_.back()); }
  double t_end() const { return solution_.t_end(); }
  std::span<const double> mesh() const { return solution_.mesh(); }
  const DenseSolution<kDim>& solution() const { return solution_; }
  const ControlSchedule& control() const { return control_; }

 private:
  DenseSolution<kDim> solution_;
  ControlSchedule control_;
};

using ReducedTrajectory = Trajectory<ReducedState>;
using FullTrajectory = Trajectory<FullState>;

/// Integrates the reduced model from s0 over [t_begin, t_end] under `u`.
/// Control-segment boundaries are mandatory mesh points. When s0 lies in the
/// invariant region (0, F_bar] x R+, leaving it by more than 1e-6 F_bar
/// raises InvariantBreach.
ReducedTrajectory integrate(const Params& p, const ReducedState& s0, const ControlSchedule& u,
                            double t_begin, double t_end, Tolerance tol = {});
FullTrajectory integrate(const Params& p, const FullState& s0, const ControlSchedule& u,
                         double t_begin, double t_end, Tolerance tol = {});

/// Convenience: the full span [0, T] of the schedule.
template <class State>
Trajectory<State> integrate(const Params& p, const State& s0, const ControlSchedule& u,
                            Tolerance tol = {}) {
  return integrate(p, s0, u, 0.0, u.horizon(), tol);
}

/// First sign change of g along an already-integrated trajectory.
template <class State>
std::optional<std::pair<double, State>> locate_event(
    const Trajectory<State>& traj, const std::function<double(const State&)>& g,
    Crossing dir = Crossing::kAny, std::optional<double> t_from = std::nullopt) {
  auto ev = locate_crossing(
      traj.solution(),
      [&g](const Vec<Trajectory<State>::kDim>& y) { return g(State::from_array(y)); }, dir,
      t_from);
  if (!ev) return std::nullopt;
  return std::make_pair(ev->t, State::from_array(ev->state));
}

/// Integrates and then locates the first crossing of g.
template <class State>
std::optional<std::pair<double, State>> locate_event(
    const Params& p, const State& s0, const ControlSchedule& u,
    const std::function<double(const State&)>& g, double t_begin, double t_end,
    Crossing dir = Crossing::kAny, Tolerance tol = {}) {
  const Trajectory<State> traj = integrate(p, s0, u, t_begin, t_end, tol);
  return locate_event(traj, g, dir);
}

/// Persistence-equilibrium starting states (no sterile males).
ReducedState reduced_equilibrium(const Params& p);
FullState full_equilibrium(const Params& p);

}  // namespace sitopt

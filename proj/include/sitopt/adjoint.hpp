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

#include <vector>

#include "sitopt/integrator.hpp"

namespace sitopt {

template <class State>
struct CostateDim;
template <>
struct CostateDim<ReducedState> : std::integral_constant<std::size_t, 2> {};
template <>
struct CostateDim<FullState> : std::integral_constant<std::size_t, 4> {};

/// Solution of the linear adjoint system attached to a forward trajectory,
/// integrated backward from the transversality conditions
///   reduced (Q, R)(T) = (1, 0),  full (P, Q, R, S)(T) = (0, 0, 1, 0).
///
/// Internally the system runs in reversed time s = T - t with one extra
/// quadrature component accumulating the integral of the control-sensitivity
/// component (R for reduced, S for full) from t to T.
template <class State>
class AdjointTrajectory {
 public:
  static constexpr std::size_t kDim = CostateDim<State>::value;

  AdjointTrajectory(DenseSolution<kDim + 1> reversed, double T)
      : reversed_(std::move(reversed)), T_(T) {}

  ModelKind kind() const { return StateTraits<State>::kKind; }
  double horizon() const { return T_; }

  /// Costate at time t in [0, T].
  Vec<kDim> costate(double t) const {
    const Vec<kDim + 1> z = reversed_.sample(T_ - t);
    Vec<kDim> out{};
    for (std::size_t i = 0; i < kDim; ++i) out[i] = z[i];
    return out;
  }

  /// The component multiplying the control in the terminal-state gradient.
  double sensitivity(double t) const { return costate(t)[kDim - 1]; }

  /// Integral of sensitivity over [a, b].
  double sensitivity_integral(double a, double b) const {
    return reversed_.sample(T_ - a)[kDim] - reversed_.sample(T_ - b)[kDim];
  }

  /// Reversed-time mesh mapped back to forward times (ascending).
  std::vector<double> mesh() const {
    std::vector<double> m;
    for (auto it = reversed_.mesh().rbegin(); it != reversed_.mesh().rend(); ++it) {
      m.push_back(T_ - *it);
    }
    return m;
  }

 private:
  DenseSolution<kDim + 1> reversed_;
  double T_;
};

using ReducedAdjoint = AdjointTrajectory<ReducedState>;
using FullAdjoint = AdjointTrajectory<FullState>;

/// Backward adjoint solve with Jacobian entries taken from the forward dense
/// output. Uses the same tolerance as the forward solve by default.
ReducedAdjoint adjoint_solve(const Params& p, const ReducedTrajectory& forward,
                             Tolerance tol = {});
FullAdjoint adjoint_solve(const Params& p, const FullTrajectory& forward, Tolerance tol = {});

/// F(T) and its gradient with respect to piecewise-constant control cells.
struct TerminalSensitivity {
  double F_terminal;
  std::vector<double> gradient;  // cell i: integral of R (or S) over the cell
};

/// Gradient of the terminal female population for a control of
/// `cells.size()` equal cells on [0, T], starting from persistence.
TerminalSensitivity gradient_terminal(const Params& p, ModelKind model,
                                      const std::vector<double>& cells, double T,
                                      Tolerance tol = {});

/// Terminal female population only (no adjoint).
double terminal_females(const Params& p, ModelKind model, const std::vector<double>& cells,
                        double T, Tolerance tol = {});

}  // namespace sitopt

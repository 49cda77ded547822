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

#include <array>
#include <complex>
#include <vector>

#include "sitopt/params.hpp"

namespace sitopt {

/// Two-compartment state: fertilized females and sterile males.
struct ReducedState {
  double F = 0.0;
  double Ms = 0.0;

  std::array<double, 2> to_array() const { return {F, Ms}; }
  static ReducedState from_array(const std::array<double, 2>& y) { return {y[0], y[1]}; }
};

/// Four-compartment state: aquatic phase, wild males, fertilized females,
/// sterile males.
struct FullState {
  double E = 0.0;
  double M = 0.0;
  double F = 0.0;
  double Ms = 0.0;

  std::array<double, 4> to_array() const { return {E, M, F, Ms}; }
  static FullState from_array(const std::array<double, 4>& y) { return {y[0], y[1], y[2], y[3]}; }
};

enum class ModelKind { kReduced, kFull };

const char* to_string(ModelKind kind);

/// Female growth rate of the reduced system, evaluated in its factored
/// rational form. f(0, Ms) = 0 for every Ms >= 0.
double female_rate(const Params& p, double F, double Ms);

/// The same function evaluated through the Lambda parametrization.
double female_rate_lambda(const LambdaForm& l, double delta_F, double F, double Ms);

std::array<double, 2> rhs_reduced(const Params& p, const ReducedState& s, double u);
std::array<double, 4> rhs_full(const Params& p, const FullState& s, double u);

struct Partials {
  double f;
  double df_dF;
  double df_dMs;
  double d2f_dMs2;
  double d2f_dMsdF;
};

/// Closed-form derivatives of f via the Lambda form. Requires F > 0.
Partials f_partials(const Params& p, double F, double Ms);

/// Sterile-male level at which the female population stalls: the unique
/// Ms >= 0 with f(F, Ms) = 0 for F in (0, F_bar), and 0 elsewhere.
double phi_threshold(const Params& p, double F);

using Jacobian2 = std::array<std::array<double, 2>, 2>;
using Jacobian4 = std::array<std::array<double, 4>, 4>;

Jacobian2 jacobian_reduced(const Params& p, const ReducedState& s);

/// Analytic Jacobian of the four-compartment vector field. Where M + gamma_s Ms
/// vanishes the mating ratio is taken along its Ms = 0 limit (ratio 1).
Jacobian4 jacobian_full(const Params& p, const FullState& s);

enum class Stability { kStable, kUnstable, kMarginal };

const char* to_string(Stability s);

struct Equilibrium {
  FullState state;
  std::vector<std::complex<double>> eigenvalues;
  Stability stability;
};

/// Steady states of the full model under a constant release rate, with the
/// spectrum of the analytic Jacobian at each. For u_const > U* only the
/// extinction state exists.
std::vector<Equilibrium> equilibria_and_stability(const Params& p, double u_const);

}  // namespace sitopt

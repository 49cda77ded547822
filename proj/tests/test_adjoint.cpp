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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sitopt/adjoint.hpp"
#include "support.hpp"

namespace sitopt {
namespace {

using testing::reference_params;

TEST(Adjoint, ClosedFormAtRest) {
  // u = 0 at the persistence equilibrium: the coefficients are frozen.
  const Params p = reference_params();
  const double T = 100.0;
  const auto fwd = integrate(p, reduced_equilibrium(p), ControlSchedule::off(T));
  const ReducedAdjoint adj = adjoint_solve(p, fwd);
  const Partials d = f_partials(p, derive_quantities(p).F_bar, 0.0);
  const double ds = p.delta_s();
  for (double t = 0.0; t <= T; t += 12.5) {
    const double s = T - t;
    const double Q = std::exp(d.df_dF * s);
    const double R = d.df_dMs * (std::exp(d.df_dF * s) - std::exp(-ds * s)) / (d.df_dF + ds);
    EXPECT_NEAR(adj.costate(t)[0], Q, 1e-8 * Q) << t;
    EXPECT_NEAR(adj.sensitivity(t), R, 1e-8 * std::abs(R) + 1e-14) << t;
  }
  EXPECT_NEAR(adj.sensitivity_integral(0.0, T),
              d.df_dMs / (d.df_dF + ds) *
                  ((std::exp(d.df_dF * T) - 1) / d.df_dF + (std::exp(-ds * T) - 1) / ds),
              1e-8 * std::abs(adj.sensitivity_integral(0.0, T)));
}

TEST(Adjoint, SignsUnderRelease) {
  const Params p = reference_params();
  const double T = 150.0;
  const ControlSchedule u = ControlSchedule::pulses(T, 8000.0, 7.0, 1.0);
  const ReducedAdjoint r = adjoint_solve(p, integrate(p, reduced_equilibrium(p), u));
  EXPECT_EQ(r.sensitivity(T), 0.0);
  EXPECT_EQ(r.costate(T)[0], 1.0);
  for (double t = 0.0; t < T; t += 0.5) {
    EXPECT_LT(r.sensitivity(t), 0.0) << t;
    EXPECT_GT(r.costate(t)[0], 0.0) << t;
  }
  const FullAdjoint f = adjoint_solve(p, integrate(p, full_equilibrium(p), u));
  EXPECT_EQ(f.sensitivity(T), 0.0);
  const auto lam = f.costate(T);
  EXPECT_EQ(lam[0], 0.0);
  EXPECT_EQ(lam[1], 0.0);
  EXPECT_EQ(lam[2], 1.0);
  for (double t = T - 20.0; t < T; t += 0.5) EXPECT_LT(f.sensitivity(t), 0.0) << t;
  const auto mesh = f.mesh();
  EXPECT_EQ(mesh.front(), 0.0);
  EXPECT_EQ(mesh.back(), T);
}

void check_gradient(ModelKind model, std::uint64_t seed) {
  const Params p = reference_params();
  const double T = 120.0, U = 5000.0;
  const std::size_t n = 24;
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> cells(n);
    for (double& c : cells) c = testing::uniform(rng, 2e-3 * U, U);  // room for the FD step
    const TerminalSensitivity g = gradient_terminal(p, model, cells, T);
    EXPECT_NEAR(g.F_terminal, terminal_females(p, model, cells, T), 1e-9 * g.F_terminal);
    double gmax = 0.0;
    for (double v : g.gradient) gmax = std::max(gmax, std::abs(v));
    for (std::size_t k = 0; k < n; k += 5) {
      const double h = 1e-3 * U;
      auto plus = cells, minus = cells;
      plus[k] += h;
      minus[k] -= h;
      const double fd =
          (terminal_females(p, model, plus, T) - terminal_females(p, model, minus, T)) / (2 * h);
      EXPECT_NEAR(g.gradient[k], fd, 1e-4 * gmax) << to_string(model) << " trial " << trial
                                                   << " cell " << k;
      EXPECT_LE(g.gradient[k], 0.0);
    }
  }
}

TEST(Adjoint, ReducedGradientMatchesFiniteDifferences) { check_gradient(ModelKind::kReduced, 11); }
TEST(Adjoint, FullGradientMatchesFiniteDifferences) { check_gradient(ModelKind::kFull, 12); }

TEST(Adjoint, ZeroControlGradientStrictlyNegative) {
  const Params p = reference_params();
  for (ModelKind m : {ModelKind::kReduced, ModelKind::kFull}) {
    const TerminalSensitivity g = gradient_terminal(p, m, std::vector<double>(40, 0.0), 200.0);
    EXPECT_NEAR(g.F_terminal, derive_quantities(p).F_bar, 1e-6 * g.F_terminal);
    for (double v : g.gradient) EXPECT_LT(v, 0.0) << to_string(m);
  }
}

}  // namespace
}  // namespace sitopt

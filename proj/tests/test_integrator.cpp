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

#include "sitopt/errors.hpp"
#include "sitopt/integrator.hpp"
#include "support.hpp"

namespace sitopt {
namespace {

using testing::rel_err;
using testing::reference_params;

TEST(Schedule, Evaluation) {
  const ControlSchedule u = ControlSchedule::pulses(70.0, 20000.0, 10.0, 1.0);
  EXPECT_EQ(u.segments().size(), 14u);
  EXPECT_EQ(u(0.0), 20000.0);
  EXPECT_EQ(u(0.5), 20000.0);
  EXPECT_EQ(u(1.0), 0.0);  // later segment wins at a boundary
  EXPECT_EQ(u(69.0), 0.0);
  EXPECT_EQ(u(70.0), 0.0);
  EXPECT_EQ(u(60.5), 20000.0);
  EXPECT_DOUBLE_EQ(u.integral(), 7 * 20000.0);
  EXPECT_DOUBLE_EQ(u.integral(0.5, 10.5), 0.5 * 20000.0 + 0.5 * 20000.0);
  EXPECT_EQ(u.max_rate(), 20000.0);
  EXPECT_THROW(u(70.5), Error);
  EXPECT_THROW(u(-1e-9), Error);
}

TEST(Schedule, SampledSegmentsInterpolateLinearly) {
  SampledSegment s{{2.0, 3.0, 5.0}, {0.0, 10.0, 30.0}};
  const ControlSchedule u({Segment{0.0, 2.0, OffSegment{}}, Segment{2.0, 5.0, s},
                           Segment{5.0, 6.0, ConstantSegment{4.0}}});
  EXPECT_DOUBLE_EQ(u(2.5), 5.0);
  EXPECT_DOUBLE_EQ(u(4.0), 20.0);
  EXPECT_DOUBLE_EQ(u.integral(), 5.0 + 40.0 + 4.0);
  EXPECT_DOUBLE_EQ(u.integral(2.5, 4.0), 0.5 * (5 + 10) * 0.5 + 0.5 * (10 + 20));
  EXPECT_EQ(u.boundaries(), (std::vector<double>{0.0, 2.0, 5.0, 6.0}));
}

TEST(Schedule, RejectsMalformedSegments) {
  EXPECT_THROW(ControlSchedule({Segment{0.0, 1.0, OffSegment{}}, Segment{1.5, 2.0, OffSegment{}}}),
               Error);
  EXPECT_THROW(ControlSchedule({Segment{0.0, 1.0, ConstantSegment{-1.0}}}), Error);
  EXPECT_THROW(ControlSchedule({Segment{0.0, 1.0, ConstantSegment{10.0}}}, 5.0), Error);
  EXPECT_THROW(ControlSchedule({Segment{0.5, 1.0, OffSegment{}}}), Error);
  EXPECT_THROW(ControlSchedule::piecewise_constant(1.0, {}), Error);
}

TEST(Integrator, LinearDecay) {
  const Params p = reference_params();
  const auto traj = integrate(p, ReducedState{0.0, 1.0}, ControlSchedule::off(10.0));
  EXPECT_LT(rel_err(traj.terminal().Ms, std::exp(-1.2)), 1e-8);
  EXPECT_EQ(traj.terminal().F, 0.0);
  // dense output between mesh points
  const auto mesh = traj.mesh();
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const double t = 0.5 * (mesh[i] + mesh[i + 1]);
    EXPECT_NEAR(traj.sample(t).Ms, std::exp(-0.12 * t), 1e-7);
  }
}

TEST(Integrator, ConstantInflow) {
  const Params p = reference_params();
  const double u = 3000.0;
  const auto traj = integrate(p, ReducedState{0.0, 0.0}, ControlSchedule::constant(40.0, u));
  for (double t : {1.0, 7.5, 20.0, 40.0}) {
    EXPECT_LT(rel_err(traj.sample(t).Ms, u / 0.12 * (1 - std::exp(-0.12 * t))), 1e-8) << t;
  }
}

TEST(Integrator, MeshExactnessAndBreakpoints) {
  const Params p = reference_params();
  const ControlSchedule u = ControlSchedule::pulses(70.0, 20000.0, 10.0, 1.0);
  const auto traj = integrate(p, reduced_equilibrium(p), u);
  const auto mesh = traj.mesh();
  const auto& states = traj.solution().states();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const ReducedState s = traj.sample(mesh[i]);
    EXPECT_EQ(s.F, states[i][0]);
    EXPECT_EQ(s.Ms, states[i][1]);
  }
  for (double b : u.boundaries()) {
    EXPECT_TRUE(std::binary_search(mesh.begin(), mesh.end(), b)) << b;
  }
  EXPECT_THROW(traj.sample(70.0001), Error);
}

TEST(Integrator, ToleranceFloor) {
  const Params p = reference_params();
  EXPECT_THROW(integrate(p, reduced_equilibrium(p), ControlSchedule::off(1.0), Tolerance{1e-13, 1e-12}),
               Error);
}

TEST(Integrator, StepSizeUnderflowOnBlowUp) {
  OdeOptions<1> opt;
  opt.scale = {1.0};
  auto rhs = [](double, const Vec<1>& y, const Interval&) { return Vec<1>{y[0] * y[0]}; };
  try {
    integrate_ode<1>(rhs, Vec<1>{1.0}, 0.0, 2.0, opt);
    FAIL() << "integrated through a singularity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStepSizeUnderflow);
  }
}

// Work-precision order of the 5(4) pair: error against a tight reference
// versus the number of steps taken.
TEST(Integrator, ObservedOrder) {
  const Params p = reference_params();
  const ControlSchedule u = ControlSchedule::constant(100.0, 3000.0);
  const double ref = integrate(p, reduced_equilibrium(p), u, Tolerance{1e-12, 1e-14}).terminal().F;
  std::vector<double> err, steps;
  for (double rel : {1e-5, 1e-6, 1e-7, 1e-8}) {
    const auto traj = integrate(p, reduced_equilibrium(p), u, Tolerance{rel, 1e-12});
    err.push_back(std::abs(traj.terminal().F - ref));
    steps.push_back(static_cast<double>(traj.solution().steps()));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], err[i - 1]);
  const double order = -std::log(err.back() / err.front()) / std::log(steps.back() / steps.front());
  EXPECT_GE(order, 4.0) << "steps " << steps.front() << ".." << steps.back();
}

TEST(Integrator, DenseOutputTracksFineReference) {
  const Params p = reference_params();
  const ControlSchedule u = ControlSchedule::constant(60.0, 12000.0);
  const auto coarse = integrate(p, reduced_equilibrium(p), u);
  const auto fine = integrate(p, reduced_equilibrium(p), u, Tolerance{1e-11, 1e-14});
  const double F_bar = derive_quantities(p).F_bar;
  double prev = coarse.sample(0.0).F;
  for (double t = 0.01; t <= 60.0; t += 0.01) {
    const double F = coarse.sample(t).F;
    EXPECT_LE(F, prev);  // decreasing everywhere, not just at mesh points
    EXPECT_NEAR(F, fine.sample(t).F, 1e-7 * F_bar);
    prev = F;
  }
}

// Classical RK4 on a very fine grid with cubic Hermite interpolation: an
// independent route to an event time.
double rk4_crossing(const Params& p, double u, double level) {
  const double h = 1e-3;
  std::array<double, 2> y = reduced_equilibrium(p).to_array();
  auto rhs = [&](const std::array<double, 2>& s) { return rhs_reduced(p, ReducedState::from_array(s), u); };
  for (double t = 0.0; t < 500.0; t += h) {
    const auto k1 = rhs(y);
    const auto k2 = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const auto k3 = rhs({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const auto k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]});
    std::array<double, 2> z;
    for (int i = 0; i < 2; ++i) z[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (z[0] <= level) {
      const double f0 = k1[0], f1 = rhs(z)[0];
      auto H = [&](double s) {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y[0] + (s3 - 2 * s2 + s) * h * f0 +
               (-2 * s3 + 3 * s2) * z[0] + (s3 - s2) * h * f1;
      };
      double a = 0.0, b = 1.0;
      for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (a + b);
        (H(m) > level ? a : b) = m;
      }
      return t + h * 0.5 * (a + b);
    }
    y = z;
  }
  return -1.0;
}

TEST(Events, FemalesCrossTarget) {
  const Params p = reference_params();
  const double F_bar = derive_quantities(p).F_bar;
  const double eps = F_bar / 4;
  const ControlSchedule u = ControlSchedule::constant(200.0, 12000.0);
  const auto ev = locate_event<ReducedState>(
      p, reduced_equilibrium(p), u, [&](const ReducedState& s) { return s.F - eps; }, 0.0, 200.0,
      Crossing::kFalling);
  ASSERT_TRUE(ev.has_value());
  EXPECT_NEAR(ev->first, rk4_crossing(p, 12000.0, eps), 1e-8);
  EXPECT_NEAR(ev->second.F, eps, 1e-6 * eps);
}

TEST(Events, NoneAtRest) {
  const Params p = reference_params();
  const auto ev = locate_event<ReducedState>(
      p, reduced_equilibrium(p), ControlSchedule::off(100.0),
      [&](const ReducedState& s) { return female_rate(p, s.F, s.Ms); }, 0.0, 100.0);
  EXPECT_FALSE(ev.has_value());
}

TEST(Events, HalfLife) {
  const Params p = reference_params();
  const double c = 1000.0;
  const auto ev = locate_event<ReducedState>(
      p, ReducedState{0.0, 2 * c}, ControlSchedule::off(30.0),
      [&](const ReducedState& s) { return s.Ms - c; }, 0.0, 30.0);
  ASSERT_TRUE(ev.has_value());
  EXPECT_NEAR(ev->first, std::log(2.0) / 0.12, 1e-8);
}

TEST(Integrator, PulsedFullModelSteepensAtEachRelease) {
  const Params p = reference_params();
  const ControlSchedule u = ControlSchedule::pulses(70.0, 20000.0, 10.0, 1.0);
  const auto traj = integrate(p, full_equilibrium(p), u);
  auto slope = [&](double t) { return rhs_full(p, traj.sample(t), u(t))[2]; };
  // each one-day release makes the decline steeper than just before it,
  // and the decline eases off as the sterile males die out between releases
  for (int k = 1; k < 7; ++k) {
    EXPECT_LT(slope(10.0 * k + 1.0), slope(10.0 * k - 0.01)) << k;
    EXPECT_GT(slope(10.0 * k + 9.0), slope(10.0 * k + 1.0)) << k;
  }
  EXPECT_LT(traj.terminal().F, 0.5 * derive_quantities(p).F_bar);
}

TEST(Integrator, FullTrajectoryStaysInBox) {
  const Params p = reference_params();
  const DerivedQuantities d = derive_quantities(p);
  const auto traj = integrate(p, full_equilibrium(p), ControlSchedule::constant(50.0, 15000.0));
  for (const auto& y : traj.solution().states()) {
    EXPECT_LE(y[0], d.E_bar * (1 + 1e-9));
    EXPECT_LE(y[1], d.M_bar * (1 + 1e-9));
    EXPECT_LE(y[2], d.F_bar * (1 + 1e-9));
    for (double v : y) EXPECT_GE(v, 0.0);
  }
}

}  // namespace
}  // namespace sitopt

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

#include "sitopt/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sitopt/errors.hpp"

namespace sitopt {

const char* to_string(ModelKind kind) {
  return kind == ModelKind::kReduced ? "reduced" : "full";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kMarginal: return "marginal";
  }
  return "unknown";
}

double female_rate(const Params& p, double F, double Ms) {
  if (F == 0.0) return 0.0;
  const double c = p.nu_E() + p.delta_E();
  const double egg_term = p.beta_E() * F / p.K() + c;
  const double denominator =
      egg_term * ((1.0 - p.nu()) * p.nu_E() * p.beta_E() * F +
                  p.delta_M() * p.gamma_s() * Ms * egg_term);
  const double numerator = p.nu() * (1.0 - p.nu()) * p.beta_E() * p.beta_E() * p.nu_E() *
                           p.nu_E() * F * F;
  return numerator / denominator - p.delta_F() * F;
}

double female_rate_lambda(const LambdaForm& l, double delta_F, double F, double Ms) {
  if (F == 0.0) return 0.0;
  const double poly = l.alpha * F * F + l.beta * F + l.gamma;
  const double lambda = 1.0 / (F * F + l.a * F + Ms * poly);
  return l.mu * F * F * lambda - delta_F * F;
}

std::array<double, 2> rhs_reduced(const Params& p, const ReducedState& s, double u) {
  return {female_rate(p, s.F, s.Ms), u - p.delta_s() * s.Ms};
}

std::array<double, 4> rhs_full(const Params& p, const FullState& s, double u) {
  const double c = p.nu_E() + p.delta_E();
  const double pairing = s.M + p.gamma_s() * s.Ms;
  const double ratio = pairing > 0.0 ? s.M / pairing : 0.0;
  return {
      p.beta_E() * s.F * (1.0 - s.E / p.K()) - c * s.E,
      (1.0 - p.nu()) * p.nu_E() * s.E - p.delta_M() * s.M,
      p.nu() * p.nu_E() * s.E * ratio - p.delta_F() * s.F,
      u - p.delta_s() * s.Ms,
  };
}

Partials f_partials(const Params& p, double F, double Ms) {
  if (!(F > 0.0)) {
    throw Error(ErrorCode::kDomainError, "f_partials requires F > 0");
  }
  const LambdaForm l = lambda_form(p);
  const double poly = l.alpha * F * F + l.beta * F + l.gamma;   // d(1/Lambda)/dMs
  const double dpoly = 2.0 * l.alpha * F + l.beta;
  const double lin = 2.0 * F + l.a + Ms * dpoly;                 // d(1/Lambda)/dF
  const double L = 1.0 / (F * F + l.a * F + Ms * poly);
  const double L2 = L * L;
  const double L3 = L2 * L;

  Partials d{};
  d.f = l.mu * F * F * L - p.delta_F() * F;
  d.df_dMs = -l.mu * F * F * L2 * poly;
  d.df_dF = 2.0 * l.mu * F * L - l.mu * F * F * L2 * lin - p.delta_F();
  d.d2f_dMs2 = 2.0 * l.mu * F * F * L3 * poly * poly;
  d.d2f_dMsdF = -l.mu * F * L2 * (2.0 * poly + F * dpoly) + 2.0 * l.mu * F * F * L3 * lin * poly;
  return d;
}

double phi_threshold(const Params& p, double F) {
  if (!(F > 0.0)) return 0.0;
  const LambdaForm l = lambda_form(p);
  // f(F, Ms) = 0  <=>  mu F = delta_F (F^2 + a F + Ms poly), and
  // mu / delta_F - a is exactly F_bar.
  const double F_bar = l.mu / p.delta_F() - l.a;
  if (F >= F_bar) return 0.0;
  const double poly = l.alpha * F * F + l.beta * F + l.gamma;
  return F * (F_bar - F) / poly;
}

Jacobian2 jacobian_reduced(const Params& p, const ReducedState& s) {
  Jacobian2 J{};
  if (s.F > 0.0) {
    const Partials d = f_partials(p, s.F, s.Ms);
    J[0] = {d.df_dF, d.df_dMs};
  } else {
    // One-sided limits at F = 0.
    const LambdaForm l = lambda_form(p);
    const double df_dF = s.Ms > 0.0 ? -p.delta_F() : l.mu / l.a - p.delta_F();
    J[0] = {df_dF, 0.0};
  }
  J[1] = {0.0, -p.delta_s()};
  return J;
}

Jacobian4 jacobian_full(const Params& p, const FullState& s) {
  const double c = p.nu_E() + p.delta_E();
  const double g = p.gamma_s();
  const double birth = p.nu() * p.nu_E();
  const double pairing = s.M + g * s.Ms;

  double ratio = 1.0;
  double dratio_dM = 0.0;
  double dratio_dMs = 0.0;
  if (pairing > 0.0) {
    ratio = s.M / pairing;
    dratio_dM = g * s.Ms / (pairing * pairing);
    dratio_dMs = -g * s.M / (pairing * pairing);
  }

  Jacobian4 J{};
  J[0] = {-p.beta_E() * s.F / p.K() - c, 0.0, p.beta_E() * (1.0 - s.E / p.K()), 0.0};
  J[1] = {(1.0 - p.nu()) * p.nu_E(), -p.delta_M(), 0.0, 0.0};
  J[2] = {birth * ratio, birth * s.E * dratio_dM, -p.delta_F(), birth * s.E * dratio_dMs};
  J[3] = {0.0, 0.0, 0.0, -p.delta_s()};
  return J;
}

namespace {

Equilibrium classify(const Params& p, const FullState& s) {
  const Jacobian4 J = jacobian_full(p, s);
  Eigen::Matrix4d A;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = J[i][j];
  Eigen::EigenSolver<Eigen::Matrix4d> solver(A, /*computeEigenvectors=*/false);
  Equilibrium eq{s, {}, Stability::kMarginal};
  double max_re = -std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> ev = solver.eigenvalues()(i);
    eq.eigenvalues.push_back(ev);
    max_re = std::max(max_re, ev.real());
    max_abs = std::max(max_abs, std::abs(ev));
  }
  std::sort(eq.eigenvalues.begin(), eq.eigenvalues.end(),
            [](const auto& a, const auto& b) { return a.real() < b.real(); });
  const double tol = 1e-12 * std::max(max_abs, 1.0);
  if (max_re < -tol) {
    eq.stability = Stability::kStable;
  } else if (max_re > tol) {
    eq.stability = Stability::kUnstable;
  }
  return eq;
}

}  // namespace

std::vector<Equilibrium> equilibria_and_stability(const Params& p, double u_const) {
  if (u_const < 0.0) {
    throw Error(ErrorCode::kDomainError, "release rate must be non-negative");
  }
  const DerivedQuantities d = derive_quantities(p);
  const double Ms = u_const / p.delta_s();
  const double male_per_egg = (1.0 - p.nu()) * p.nu_E() / p.delta_M();

  std::vector<Equilibrium> out;
  out.push_back(classify(p, FullState{0.0, 0.0, 0.0, Ms}));

  auto state_from_E = [&](double E) {
    const double M = male_per_egg * E;
    const double F = p.nu() * p.nu_E() * E * M / (p.delta_F() * (M + p.gamma_s() * Ms));
    return FullState{E, M, F, Ms};
  };

  if (u_const == 0.0) {
    out.push_back(classify(p, FullState{d.E_bar, d.M_bar, d.F_bar, 0.0}));
    return out;
  }

  // Non-zero equilibria solve A E^2 + B E + C = 0.
  const double k = p.beta_E() * p.nu() * (1.0 - p.nu()) * p.nu_E() * p.nu_E() /
                   (p.delta_F() * p.delta_M());
  const double A = k / p.K();
  const double B = -k * (1.0 - 1.0 / d.R0);
  const double C = p.gamma_s() * (p.nu_E() + p.delta_E()) * u_const / p.delta_s();
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return out;
  const double root = std::sqrt(disc);
  // Numerically stable pair: q = -(B - sqrt(disc))/2 with B < 0.
  const double q = -0.5 * (B - root);
  const double E_hi = q / A;
  const double E_lo = C / q;
  out.push_back(classify(p, state_from_E(E_lo)));
  if (disc > 0.0) out.push_back(classify(p, state_from_E(E_hi)));
  return out;
}

}  // namespace sitopt

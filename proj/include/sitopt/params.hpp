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

namespace sitopt {

/// Biological rates of the mosquito life cycle (per day unless noted). The
/// defaults are the chosen values of the reference parameter table, with the
/// hatching rate set to 0.05.
struct Biology {
  double beta_E = 10.0;    // effective fecundity
  double nu_E = 0.05;      // hatching rate
  double delta_E = 0.03;   // aquatic-phase death rate
  double delta_M = 0.1;    // wild male death rate
  double delta_F = 0.04;   // female death rate
  double delta_s = 0.12;   // sterile male death rate
  double nu = 0.49;        // probability a pupa is female, in (0,1)
  double gamma_s = 1.0;    // mating competitiveness of sterile males, in (0,1]
};

/// Complete, validated parameter set: biology plus egg carrying capacity K.
///
/// Construction enforces positivity of rates, nu in (0,1), gamma_s in (0,1],
/// K > 0 and the persistence hypothesis delta_s > delta_M, R0 > 1. A Params
/// value therefore always describes a population with a positive equilibrium.
class Params {
 public:
  Params(const Biology& bio, double K);

  const Biology& bio() const { return bio_; }
  double K() const { return K_; }

  double beta_E() const { return bio_.beta_E; }
  double nu_E() const { return bio_.nu_E; }
  double delta_E() const { return bio_.delta_E; }
  double delta_M() const { return bio_.delta_M; }
  double delta_F() const { return bio_.delta_F; }
  double delta_s() const { return bio_.delta_s; }
  double nu() const { return bio_.nu; }
  double gamma_s() const { return bio_.gamma_s; }

 private:
  Biology bio_;
  double K_;
};

/// Basic offspring number nu*beta_E*nu_E / (delta_F*(nu_E+delta_E)).
double basic_offspring_number(const Biology& bio);

/// Throws InvalidParameter or HypothesisViolation if `bio` cannot be completed
/// into a valid Params (the K-independent checks).
void validate_biology(const Biology& bio);

/// Constants of the rational form f = mu F^2 Lambda - delta_F F with
/// Lambda = 1 / (F^2 + a F + Ms (alpha F^2 + beta F + gamma)).
struct LambdaForm {
  double mu;
  double a;
  double alpha;
  double beta;
  double gamma;
};

struct DerivedQuantities {
  double R0;
  double Ustar;   // critical constant release rate
  double E_bar;
  double M_bar;
  double F_bar;
  LambdaForm lambda_form;
};

DerivedQuantities derive_quantities(const Params& p);
LambdaForm lambda_form(const Params& p);

/// Equilibrium compartment used to fix the carrying capacity.
enum class Anchor { kEBar, kMBar, kFBar };

/// Returns the Params whose persistence equilibrium has the requested value
/// of the anchored compartment.
Params calibrate_capacity(const Biology& bio, Anchor anchor, double value);

}  // namespace sitopt

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

#include "sitopt/params.hpp"

#include <cmath>
#include <string>

#include "sitopt/errors.hpp"

namespace sitopt {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidParameter, std::string(name) + " must be positive and finite");
  }
}

}  // namespace

double basic_offspring_number(const Biology& b) {
  return b.nu * b.beta_E * b.nu_E / (b.delta_F * (b.nu_E + b.delta_E));
}

void validate_biology(const Biology& b) {
  require_positive(b.beta_E, "beta_E");
  require_positive(b.nu_E, "nu_E");
  require_positive(b.delta_E, "delta_E");
  require_positive(b.delta_M, "delta_M");
  require_positive(b.delta_F, "delta_F");
  require_positive(b.delta_s, "delta_s");
  if (!(b.nu > 0.0 && b.nu < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "nu must lie in (0,1)");
  }
  if (!(b.gamma_s > 0.0 && b.gamma_s <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "gamma_s must lie in (0,1]");
  }
  if (!(b.delta_s > b.delta_M)) {
    throw Error(ErrorCode::kHypothesisViolation, "delta_s must exceed delta_M");
  }
  if (!(basic_offspring_number(b) > 1.0)) {
    throw Error(ErrorCode::kHypothesisViolation,
                "R0 = " + std::to_string(basic_offspring_number(b)) + " must exceed 1");
  }
}

Params::Params(const Biology& bio, double K) : bio_(bio), K_(K) {
  validate_biology(bio_);
  require_positive(K_, "K");
}

LambdaForm lambda_form(const Params& p) {
  const double c = p.nu_E() + p.delta_E();
  const double denom = (1.0 - p.nu()) * p.nu_E();
  const double dg = p.delta_M() * p.gamma_s();
  LambdaForm l{};
  l.mu = p.K() * p.nu() * p.nu_E();
  l.a = p.K() * c / p.beta_E();
  l.alpha = dg / (p.K() * denom);
  l.beta = 2.0 * dg * c / (denom * p.beta_E());
  l.gamma = dg * p.K() * c * c / (denom * p.beta_E() * p.beta_E());
  return l;
}

DerivedQuantities derive_quantities(const Params& p) {
  DerivedQuantities d{};
  d.R0 = basic_offspring_number(p.bio());
  const double survive = 1.0 - 1.0 / d.R0;
  d.E_bar = p.K() * survive;
  d.M_bar = (1.0 - p.nu()) * p.nu_E() * d.E_bar / p.delta_M();
  d.F_bar = p.nu() * p.nu_E() * d.E_bar / p.delta_F();
  d.Ustar = d.R0 * p.K() * (1.0 - p.nu()) * p.nu_E() * p.delta_s() /
            (4.0 * p.gamma_s() * p.delta_M()) * survive * survive;
  d.lambda_form = lambda_form(p);
  return d;
}

Params calibrate_capacity(const Biology& bio, Anchor anchor, double value) {
  validate_biology(bio);
  require_positive(value, "anchor value");
  double E_bar = 0.0;
  switch (anchor) {
    case Anchor::kEBar: E_bar = value; break;
    case Anchor::kMBar: E_bar = bio.delta_M * value / ((1.0 - bio.nu) * bio.nu_E); break;
    case Anchor::kFBar: E_bar = bio.delta_F * value / (bio.nu * bio.nu_E); break;
  }
  const double prefactor =
      1.0 - bio.delta_F * (bio.nu_E + bio.delta_E) / (bio.beta_E * bio.nu * bio.nu_E);
  if (!(prefactor > 0.0)) {
    throw Error(ErrorCode::kHypothesisViolation, "capacity prefactor is not positive (R0 <= 1)");
  }
  return Params(bio, E_bar / prefactor);
}

}  // namespace sitopt

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

#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "sitopt/params.hpp"

namespace sitopt::testing {

/// Default biology (nu_E = 0.05 unless given), K from F_bar = 11037.
inline Params reference_params(double nu_E = 0.05) {
  Biology b;
  b.nu_E = nu_E;
  return calibrate_capacity(b, Anchor::kFBar, 11037.0);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random biology inside the published value intervals, hypothesis (H) kept.
inline Biology random_biology(std::mt19937_64& rng) {
  Biology b;
  b.beta_E = uniform(rng, 7.46, 14.85);
  b.gamma_s = uniform(rng, 0.05, 1.0);
  b.nu_E = uniform(rng, 0.005, 0.25);
  b.delta_E = uniform(rng, 0.023, 0.046);
  b.delta_F = uniform(rng, 0.033, 0.046);
  b.delta_M = uniform(rng, 0.077, 0.139);
  b.delta_s = uniform(rng, b.delta_M + 0.005, 0.2);
  b.nu = uniform(rng, 0.4, 0.6);
  return b;
}

inline Params random_params(std::mt19937_64& rng) {
  return calibrate_capacity(random_biology(rng), Anchor::kFBar, uniform(rng, 2000.0, 30000.0));
}

inline std::string describe(const Biology& b) {
  std::ostringstream os;
  os << "beta_E=" << b.beta_E << " nu_E=" << b.nu_E << " delta_E=" << b.delta_E
     << " delta_M=" << b.delta_M << " delta_F=" << b.delta_F << " delta_s=" << b.delta_s
     << " nu=" << b.nu << " gamma_s=" << b.gamma_s;
  return os.str();
}

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// Minimal property runner: `cases` draws from a seeded generator; the
/// property returns an empty string on success or a failure message.
/// Stops at the first failing case and reports its index and the seed.
inline void for_all(const char* name, int cases, std::uint64_t seed,
                    const std::function<std::string(std::mt19937_64&, int)>& property) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    const std::string failure = property(rng, i);
    if (!failure.empty()) {
      ADD_FAILURE() << name << ": case " << i << " (seed " << seed << ") failed: " << failure;
      return;
    }
  }
}

}  // namespace sitopt::testing

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

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "sitopt/report.hpp"

namespace sitopt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_grid(const std::vector<double>& grid) {
  for (double v : grid) {
    if (!(v >= 0.005 && v <= 0.25)) {
      throw Error(ErrorCode::kInvalidParameter, "nu_E grid must lie in [0.005, 0.25]");
    }
  }
}

void note(SweepRow& row, const std::string& what) {
  if (row.status == "ok") row.status = what;
}

SweepRow sweep_row(const ParamConfig& base, double nu_E, ProblemSpec spec, const SweepOptions& opt) {
  SweepRow row{nu_E, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, "ok"};
  ParamConfig cfg = base;
  cfg.bio.nu_E = nu_E;
  std::optional<Params> built;
  try {
    built.emplace(cfg.build());
  } catch (const Error& e) {
    note(row, to_string(e.code()));
    return row;
  }
  const Params& p = *built;
  spec.epsilon = opt.eps_frac * derive_quantities(p).F_bar;
  spec.objective = Objective::kL1;
  try {
    spec.model = ModelKind::kReduced;
    const PlanResult r = plan_release(p, spec, opt.plan);
    row.J_plan = r.J;
    row.T_opt_plan = r.tau2;
  } catch (const Error& e) {
    note(row, to_string(e.code()));
  }
  for (ModelKind m : {ModelKind::kReduced, ModelKind::kFull}) {
    const bool wanted = m == ModelKind::kReduced ? opt.direct_reduced : opt.direct_full;
    if (!wanted) continue;
    try {
      spec.model = m;
      const OptimizationResult r = solve_direct(p, spec, opt.direct);
      if (!r.converged) note(row, to_string(ErrorCode::kMaxIterations));
      (m == ModelKind::kReduced ? row.J_direct_reduced : row.J_direct_full) = r.J;
      (m == ModelKind::kReduced ? row.T_opt_direct_reduced : row.T_opt_direct_full) =
          spec.T - r.structure.t0;
    } catch (const Error& e) {
      note(row, to_string(e.code()));
    }
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const ParamConfig& base, const std::vector<double>& nu_grid,
                            const ProblemSpec& spec, const SweepOptions& opt) {
  check_grid(nu_grid);
  std::vector<SweepRow> rows(nu_grid.size());
  const long n = static_cast<long>(nu_grid.size());
  // sweep_row never throws, so nothing escapes the parallel region
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)] =
        sweep_row(base, nu_grid[static_cast<std::size_t>(i)], spec, opt);
  }
  return rows;
}

std::vector<SweepRow> sweep_serial(const ParamConfig& base, const std::vector<double>& nu_grid,
                                   const ProblemSpec& spec, const SweepOptions& opt) {
  check_grid(nu_grid);
  std::vector<SweepRow> rows;
  for (double v : nu_grid) rows.push_back(sweep_row(base, v, spec, opt));
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "nu_E,J_plan,J_direct_reduced,J_direct_full,T_opt_plan,T_opt_direct_reduced,"
      "T_opt_direct_full,status\n";
  char buf[64];
  for (const SweepRow& r : rows) {
    for (double v : {r.nu_E, r.J_plan, r.J_direct_reduced, r.J_direct_full, r.T_opt_plan,
                     r.T_opt_direct_reduced, r.T_opt_direct_full}) {
      std::snprintf(buf, sizeof buf, "%.10g,", v);
      out += buf;
    }
    out += r.status;
    out += '\n';
  }
  return out;
}

}  // namespace sitopt

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

#include "sitopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace sitopt {

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::kOff: return "Off";
    case CellClass::kInterior: return "Singular";
    case CellClass::kUpper: return "Bang";
  }
  return "?";
}

namespace {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Spectral projected gradient with a nonmonotone Armijo search
// (Birgin, Martinez & Raydan). `value_grad` fills the gradient.
struct Spg {
  std::function<double(const Vector&)> value;
  std::function<double(const Vector&, Vector&)> value_grad;
  std::function<void(Vector&)> project;
  double alpha_ref;  // natural step: moves x by O(scale) for a unit-size gradient
  double scale;
  int memory = 10;

  struct Outcome {
    Vector x;
    double value;
    double stationarity;
    int iterations;
    bool converged;
  };

  double stationarity(const Vector& x, const Vector& g) const {
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - alpha_ref * g[i];
    project(y);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(y[i] - x[i]));
    return m / scale;
  }

  Outcome run(Vector x, double tol, int max_iter) const {
    project(x);
    Vector g(x.size());
    double f = value_grad(x, g);
    std::deque<double> recent{f};
    double alpha = alpha_ref;
    // Wide enough for BB, narrow enough that x - alpha*g keeps its digits.
    const double alpha_min = 1e-8 * alpha_ref;
    const double alpha_max = 1e4 * alpha_ref;
    Vector d(x.size()), xt(x.size()), gt(x.size());
    int it = 0;
    double stat = stationarity(x, g);
    while (it < max_iter && stat > tol) {
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - alpha * g[i];
      project(d);
      for (std::size_t i = 0; i < x.size(); ++i) d[i] -= x[i];
      const double gd = dot(g, d);
      if (!(gd < 0.0)) {
        if (alpha == alpha_ref) break;
        alpha = alpha_ref;
        continue;
      }
      const double f_ref = *std::max_element(recent.begin(), recent.end());
      double t = 1.0;
      double ft = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 50; ++ls) {
        for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + t * d[i];
        ft = value(xt);
        if (ft <= f_ref + 1e-4 * t * gd) {
          accepted = true;
          break;
        }
        const double denom = ft - f - t * gd;
        const double tq = denom > 0.0 ? -0.5 * t * t * gd / denom : 0.5 * t;
        t = std::clamp(tq, 0.1 * t, 0.5 * t);
      }
      if (!accepted) break;
      ++it;
      ft = value_grad(xt, gt);
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = xt[i] - x[i];
        ss += s * s;
        sy += s * (gt[i] - g[i]);
      }
      alpha = sy > 0.0 ? std::clamp(ss / sy, alpha_min, alpha_max) : alpha_max;
      x.swap(xt);
      g.swap(gt);
      f = ft;
      recent.push_back(f);
      if (static_cast<int>(recent.size()) > memory) recent.pop_front();
      stat = stationarity(x, g);
    }
    return Outcome{std::move(x), f, stat, it, stat <= tol};
  }
};

double control_cost(Objective o, const Vector& x, double dt) {
  double s = 0.0;
  for (double v : x) s += o == Objective::kL2 ? v * v : v;
  return s * dt;
}

void add_cost_gradient(Objective o, const Vector& x, double dt, Vector& g) {
  for (std::size_t i = 0; i < x.size(); ++i) g[i] += o == Objective::kL2 ? 2.0 * dt * x[i] : dt;
}

double full_release_terminal(const Params& p, ModelKind model, double T, double U_bar,
                             Tolerance tol) {
  return terminal_females(p, model, Vector{U_bar}, T, tol);
}

void check_reachable(const Params& p, ModelKind model, double T, double U_bar, double eps,
                     Tolerance tol) {
  if (model == ModelKind::kReduced) {
    try {
      if (minimal_time(p, U_bar, eps, tol) <= T) return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotReached) throw;
    }
  } else if (full_release_terminal(p, model, T, U_bar, tol) <= eps) {
    return;
  }
  std::ostringstream os;
  os << "constant release at " << U_bar << " cannot bring F below " << eps << " by T=" << T;
  throw Error(ErrorCode::kInfeasible, os.str());
}

// Budget multiplier from interior cells, mapped to the primal scale.
double dual_lambda(const OptimizationResult& r) {
  const double dt = r.cell_width();
  double acc = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    if (r.u[i] > 1e-6 * r.U_bar && r.u[i] < (1.0 - 1e-6) * r.U_bar) {
      acc += -r.gradient[i] / dt;
      ++n;
    }
  }
  if (n == 0 || !(acc > 0.0)) return 0.0;
  return static_cast<double>(n) / acc;
}

}  // namespace

void project_box_budget(std::vector<double>& x, double hi, std::optional<double> total) {
  for (double& v : x) v = std::clamp(v, 0.0, hi);
  if (!total) return;
  const double cap = std::max(0.0, *total);
  double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (sum <= cap) return;
  // The projection is clip(x - theta) for the theta that meets the budget;
  // the clipped sum is monotone in theta, so bisect.
  const Vector y = x;
  auto shifted_sum = [&](double theta) {
    double s = 0.0;
    for (double v : y) s += std::clamp(v - theta, 0.0, hi);
    return s;
  };
  double lo = 0.0, up = *std::max_element(y.begin(), y.end());
  for (int k = 0; k < 200 && up - lo > 1e-15 * std::max(hi, up); ++k) {
    const double mid = 0.5 * (lo + up);
    (shifted_sum(mid) > cap ? lo : up) = mid;
  }
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(y[i] - up, 0.0, hi);
}

OptimizationResult solve_direct(const Params& p, const ProblemSpec& spec,
                                const DirectOptions& opt) {
  if (spec.objective == Objective::kTerminalBudget) {
    if (!spec.budget) throw Error(ErrorCode::kInvalidParameter, "budget objective needs a budget");
    return solve_budget_dual(p, spec.model, spec.T, spec.U_bar, *spec.budget, opt);
  }
  spec.validate(p);
  if (opt.cells < 50) throw Error(ErrorCode::kInvalidParameter, "direct method needs >= 50 cells");
  check_reachable(p, spec.model, spec.T, spec.U_bar, spec.epsilon, opt.tol);

  const std::size_t n = opt.cells;
  const double dt = spec.T / static_cast<double>(n);
  const double eps = spec.epsilon;
  const double F_bar = derive_quantities(p).F_bar;
  const Objective obj = spec.objective;

  // Penalty scaled against the cost of releasing U_bar all the time.
  const double J_scale = control_cost(obj, Vector(n, spec.U_bar), dt);
  double rho = J_scale / (F_bar - eps);
  double lambda = 0.0;

  auto project = [&](Vector& x) { project_box_budget(x, spec.U_bar, std::nullopt); };
  Spg spg;
  spg.project = project;
  spg.scale = spec.U_bar;
  // With this step a unit relative imbalance in the cost gradient moves u by U_bar.
  spg.alpha_ref = obj == Objective::kL2 ? 1.0 / (2.0 * dt) : spec.U_bar / dt;
  spg.value = [&](const Vector& x) {
    const double c = terminal_females(p, spec.model, x, spec.T, opt.tol) - eps;
    return control_cost(obj, x, dt) + lambda * c + 0.5 * rho * std::pow(std::max(0.0, c), 2);
  };
  spg.value_grad = [&](const Vector& x, Vector& g) {
    const TerminalSensitivity s = gradient_terminal(p, spec.model, x, spec.T, opt.tol);
    const double c = s.F_terminal - eps;
    const double w = lambda + rho * std::max(0.0, c);
    for (std::size_t i = 0; i < n; ++i) g[i] = w * s.gradient[i];
    add_cost_gradient(obj, x, dt, g);
    return control_cost(obj, x, dt) + lambda * c + 0.5 * rho * std::pow(std::max(0.0, c), 2);
  };

  OptimizationResult r;
  r.model = spec.model;
  r.objective = obj;
  r.T = spec.T;
  r.U_bar = spec.U_bar;
  r.epsilon = eps;
  Vector x = opt.initial ? *opt.initial : Vector(n, 0.0);
  if (x.size() != n) throw Error(ErrorCode::kInvalidParameter, "initial guess has wrong size");

  double prev_violation = std::numeric_limits<double>::infinity();
  double effective = 0.0;
  Spg::Outcome inner{};
  for (int k = 0; k < opt.max_outer; ++k) {
    const double inner_tol = std::max(opt.stationarity_tol, 1e-2 * std::pow(0.1, k));
    inner = spg.run(x, inner_tol, opt.max_inner);
    x = inner.x;
    r.inner_iterations += inner.iterations;
    r.outer_iterations = k + 1;
    const double F_T = terminal_females(p, spec.model, x, spec.T, opt.tol);
    const double c = F_T - eps;
    effective = lambda + rho * std::max(0.0, c);
    const double violation = std::abs(std::max(c, -lambda / rho));
    r.history.push_back(IterationRecord{k, inner.iterations, control_cost(obj, x, dt), F_T,
                                        effective, rho, inner.stationarity});
    lambda = std::max(0.0, lambda + rho * c);
    // complementarity: a multiplier that survives the update needs c = 0
    const double slack = lambda > 0.0 ? std::abs(c) : std::max(0.0, c);
    const bool feasible = std::max(violation, slack) <= opt.feasibility_tol * eps;
    if (feasible && inner.stationarity <= opt.stationarity_tol) {
      r.converged = true;
      break;
    }
    if (violation > opt.feasibility_tol * eps && violation > 0.25 * prev_violation) rho *= 10.0;
    prev_violation = violation;
  }

  const TerminalSensitivity s = gradient_terminal(p, spec.model, x, spec.T, opt.tol);
  r.u = std::move(x);
  r.gradient = s.gradient;
  r.F_terminal = s.F_terminal;
  r.J = control_cost(obj, r.u, dt);
  r.lambda = obj == Objective::kL2 ? 0.5 * effective : effective;
  r.stationarity = inner.stationarity;
  r.structure = analyze_switching(r, opt.classify_tol);
  return r;
}

OptimizationResult solve_budget_dual(const Params& p, ModelKind model, double T, double U_bar,
                                     double budget, const DirectOptions& opt) {
  if (!(budget >= 0.0) || !(T > 0.0) || !(U_bar > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "budget problem needs T, U_bar > 0 and C >= 0");
  }
  if (opt.cells < 50) throw Error(ErrorCode::kInvalidParameter, "direct method needs >= 50 cells");
  const std::size_t n = opt.cells;
  const double dt = T / static_cast<double>(n);
  const double total = budget / dt;  // budget on the sum of cell values

  Spg spg;
  spg.project = [&](Vector& x) { project_box_budget(x, U_bar, total); };
  spg.scale = U_bar;
  spg.value = [&](const Vector& x) { return terminal_females(p, model, x, T, opt.tol); };
  spg.value_grad = [&](const Vector& x, Vector& g) {
    TerminalSensitivity s = gradient_terminal(p, model, x, T, opt.tol);
    g = std::move(s.gradient);
    return s.F_terminal;
  };

  Vector x = opt.initial ? *opt.initial : Vector(n, std::min(U_bar, budget / T));
  if (x.size() != n) throw Error(ErrorCode::kInvalidParameter, "initial guess has wrong size");
  {
    Vector g0(n);
    spg.value_grad(x, g0);
    const double gmax = norm_inf(g0);
    spg.alpha_ref = gmax > 0.0 ? U_bar / gmax : 1.0;
  }
  const Spg::Outcome out = spg.run(x, opt.stationarity_tol, opt.max_inner * opt.max_outer);

  OptimizationResult r;
  r.model = model;
  r.objective = Objective::kTerminalBudget;
  r.T = T;
  r.U_bar = U_bar;
  r.budget = budget;
  r.u = out.x;
  const TerminalSensitivity s = gradient_terminal(p, model, r.u, T, opt.tol);
  r.gradient = s.gradient;
  r.F_terminal = s.F_terminal;
  r.epsilon = s.F_terminal;
  r.J = control_cost(Objective::kL1, r.u, dt);
  r.converged = out.converged;
  r.outer_iterations = 1;
  r.inner_iterations = out.iterations;
  r.stationarity = out.stationarity;
  r.history.push_back(IterationRecord{0, out.iterations, r.J, r.F_terminal, 0.0, 0.0,
                                      out.stationarity});
  r.lambda = dual_lambda(r);
  r.history.back().lambda = r.lambda;
  r.structure = analyze_switching(r, opt.classify_tol);
  return r;
}

StructureReport analyze_switching(const OptimizationResult& r, double tol) {
  StructureReport rep;
  const std::size_t n = r.u.size();
  if (r.gradient.size() != n || n == 0) {
    throw Error(ErrorCode::kInvalidParameter, "result has no sensitivities");
  }
  const double dt = r.cell_width();
  rep.lambda = r.lambda;
  rep.lambda_positive = r.lambda > 0.0;
  rep.classes.resize(n);
  rep.sigma.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = r.u[i];
    rep.classes[i] = u <= 1e-6 * r.U_bar          ? CellClass::kOff
                     : u >= (1.0 - 1e-6) * r.U_bar ? CellClass::kUpper
                                                   : CellClass::kInterior;
    const double R = r.gradient[i] / dt;
    rep.sigma[i] = (r.objective == Objective::kL2 ? u : 1.0) + r.lambda * R;
  }
  const auto [lo, hi] = std::minmax_element(rep.sigma.begin(), rep.sigma.end());
  double range = *hi - *lo;
  if (r.objective == Objective::kL2) range = *std::max_element(r.u.begin(), r.u.end());
  if (!(range > 0.0)) range = 1.0;
  for (double& s : rep.sigma) s /= range;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = rep.sigma[i];
    const bool ok = rep.classes[i] == CellClass::kOff        ? s >= -tol
                    : rep.classes[i] == CellClass::kInterior ? std::abs(s) <= tol
                                                             : s <= tol;
    if (!ok) rep.offending.push_back(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double a = r.T * static_cast<double>(i) / static_cast<double>(n);
    const double b = r.T * static_cast<double>(i + 1) / static_cast<double>(n);
    if (!rep.arcs.empty() && rep.arcs.back().kind == rep.classes[i]) {
      rep.arcs.back().t_end = b;
    } else {
      rep.arcs.push_back(Arc{rep.classes[i], a, b});
    }
  }
  rep.t0 = rep.t1 = r.T;
  bool seen = false;
  for (const Arc& a : rep.arcs) {
    if (!rep.pattern.empty()) rep.pattern += '-';
    rep.pattern += (a.kind == CellClass::kInterior && r.objective == Objective::kL2)
                       ? "Interior"
                       : to_string(a.kind);
    if (a.kind == CellClass::kOff) continue;
    if (!seen) rep.t0 = a.t_start;
    seen = true;
    rep.t1 = a.t_end;
  }
  rep.trailing_off = rep.arcs.back().kind == CellClass::kOff;
  rep.expects_trailing_off = r.objective != Objective::kL2;
  if (r.objective == Objective::kTerminalBudget) {
    rep.constraint_active = r.J >= (1.0 - 1e-3) * r.budget;
  } else {
    rep.constraint_active = std::abs(r.F_terminal - r.epsilon) <= 1e-3 * r.epsilon;
  }
  return rep;
}

template <class State>
StructureReport verify_switching(const OptimizationResult& result,
                                 const AdjointTrajectory<State>& adjoint, double tol) {
  OptimizationResult r = result;
  const std::size_t n = r.u.size();
  r.gradient.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = r.T * static_cast<double>(i) / static_cast<double>(n);
    const double b = r.T * static_cast<double>(i + 1) / static_cast<double>(n);
    r.gradient[i] = adjoint.sensitivity_integral(a, b);
  }
  StructureReport rep = analyze_switching(r, tol);
  if (!rep.consistent()) {
    std::ostringstream os;
    os << "switching structure mismatch (" << rep.pattern << ")";
    if (!rep.trailing_off && rep.expects_trailing_off) os << "; no trailing off arc";
    if (!rep.lambda_positive) os << "; multiplier not positive";
    if (!rep.constraint_active) os << "; constraint not active";
    if (!rep.offending.empty()) {
      os << "; offending cells:";
      for (std::size_t k = 0; k < rep.offending.size() && k < 20; ++k) os << ' ' << rep.offending[k];
      if (rep.offending.size() > 20) os << " ... (" << rep.offending.size() << " total)";
    }
    throw Error(ErrorCode::kStructureMismatch, os.str());
  }
  return rep;
}

template StructureReport verify_switching(const OptimizationResult&, const ReducedAdjoint&,
                                          double);
template StructureReport verify_switching(const OptimizationResult&, const FullAdjoint&, double);

double terminal_rate(const OptimizationResult& r) {
  const std::size_t n = r.u.size();
  if (n < 4) return n == 0 ? 0.0 : r.u[n - 1];
  const double v = 25.0 * r.u[n - 1] - 23.0 * r.u[n - 2] + 13.0 * r.u[n - 3] - 3.0 * r.u[n - 4];
  return std::max(0.0, v / 12.0);
}

std::vector<double> cell_averages(const ControlSchedule& u, std::size_t n) {
  std::vector<double> out(n);
  const double T = u.horizon();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = T * static_cast<double>(i) / static_cast<double>(n);
    const double b = T * static_cast<double>(i + 1) / static_cast<double>(n);
    out[i] = u.integral(a, b) / (b - a);
  }
  return out;
}

OptimizationResult from_plan(const Params& p, const ProblemSpec& spec, const PlanResult& plan,
                             std::size_t n, Tolerance tol) {
  OptimizationResult r;
  r.model = ModelKind::kReduced;
  r.objective = Objective::kL1;
  r.T = spec.T;
  r.U_bar = spec.U_bar;
  r.epsilon = spec.epsilon;
  r.u = cell_averages(plan.schedule, n);
  const TerminalSensitivity s = gradient_terminal(p, ModelKind::kReduced, r.u, spec.T, tol);
  r.gradient = s.gradient;
  r.F_terminal = s.F_terminal;
  r.J = control_cost(Objective::kL1, r.u, r.cell_width());
  r.converged = true;
  // On the singular arc 1 + lambda*R = 0; take the median over interior cells.
  std::vector<double> est;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.u[i] > 1e-6 * r.U_bar && r.u[i] < (1.0 - 1e-6) * r.U_bar && r.gradient[i] < 0.0) {
      est.push_back(-r.cell_width() / r.gradient[i]);
    }
  }
  if (!est.empty()) {
    std::nth_element(est.begin(), est.begin() + est.size() / 2, est.end());
    r.lambda = est[est.size() / 2];
  }
  r.structure = analyze_switching(r);
  return r;
}

OptimizationResult plan_any(const Params& p, const ProblemSpec& spec, std::string* warning,
                            const DirectOptions& opt) {
  if (spec.model == ModelKind::kReduced && spec.objective == Objective::kL1) {
    PlanOptions po;
    po.tol = opt.tol;
    return from_plan(p, spec, plan_release(p, spec, po), opt.cells, opt.tol);
  }
  if (warning) {
    *warning = std::string("dichotomy planner covers the reduced L1 problem only; solving the ") +
               to_string(spec.model) + " " + to_string(spec.objective) +
               " problem with the direct method";
  }
  return solve_direct(p, spec, opt);
}

}  // namespace sitopt

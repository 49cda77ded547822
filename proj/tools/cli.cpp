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

#include "sitopt/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace sitopt {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter:
    case ErrorCode::kHypothesisViolation:
    case ErrorCode::kConfig:
    case ErrorCode::kIo:
    case ErrorCode::kOutOfRange:
      return kExitUsage;
    default:
      return kExitInfeasible;
  }
}

ControlSchedule parse_control_spec(const std::string& spec, double T) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidParameter, "bad number in control spec: " + spec);
    }
  };
  if (parts.size() == 1 && parts[0] == "off") return ControlSchedule::off(T);
  if (parts.size() == 2 && parts[0] == "const") return ControlSchedule::constant(T, number(1));
  if (parts.size() == 4 && parts[0] == "pulse") {
    return ControlSchedule::pulses(T, number(1), number(2), number(3));
  }
  throw Error(ErrorCode::kInvalidParameter,
              "control spec must be off, const:V or pulse:A:period:width, got " + spec);
}

double relative_sup_gap(const ReducedTrajectory& reduced, const FullTrajectory& full,
                        double step) {
  double gap = 0.0, peak = 0.0;
  for (double t : sample_times(full.control(), step)) {
    const double Ff = full.sample(t).F;
    gap = std::max(gap, std::abs(reduced.sample(t).F - Ff));
    peak = std::max(peak, std::abs(Ff));
  }
  return peak > 0.0 ? gap / peak : gap;
}

namespace {

struct Options {
  std::string params;
  std::vector<std::string> overrides;
  std::optional<double> T;
  double U_bar = 5000.0;
  std::optional<double> eps_frac;
  std::optional<double> eps;
  std::string model = "reduced";
  std::size_t grid = 300;
  std::string out_dir = ".";
  bool plot = false;
  std::optional<double> tol_rel;
  std::optional<double> budget;
  std::string objective = "l1";
  std::string control = "off";
  std::vector<double> nu_grid{0.005, 0.01, 0.02, 0.03, 0.05, 0.1, 0.15, 0.25};
  bool plan_only = false;
};

// Everything the commands need once flags are resolved.
struct Context {
  const Options& o;
  std::ostream& out;
  std::ostream& err;
  Params p;
  DerivedQuantities d;

  double T(double fallback) const { return o.T.value_or(fallback); }
  double epsilon() const { return o.eps ? *o.eps : o.eps_frac.value_or(0.25) * d.F_bar; }
  Tolerance tol() const {
    Tolerance t;
    if (o.tol_rel) t.rel = *o.tol_rel;
    return t;
  }
  std::string path(const std::string& name) const {
    return (std::filesystem::path(o.out_dir) / name).string();
  }
  ModelKind single_model() const {
    if (o.model == "reduced") return ModelKind::kReduced;
    if (o.model == "full") return ModelKind::kFull;
    throw Error(ErrorCode::kInvalidParameter, "this command takes --model reduced or full");
  }
  ProblemSpec spec(double T_default) const {
    ProblemSpec s;
    s.T = T(T_default);
    s.U_bar = o.U_bar;
    s.epsilon = epsilon();
    s.model = single_model();
    s.objective = o.objective == "l2" ? Objective::kL2 : Objective::kL1;
    s.budget = o.budget;
    return s;
  }
  void written(const std::string& file) const { out << "wrote " << file << '\n'; }
};

Params build_params(const Options& o) {
  ParamConfig cfg;
  if (!o.params.empty()) cfg = load_config(o.params);
  for (const std::string& kv : o.overrides) apply_override(cfg, kv);
  return cfg.build();
}

ParamConfig build_config(const Options& o) {
  ParamConfig cfg;
  if (!o.params.empty()) cfg = load_config(o.params);
  for (const std::string& kv : o.overrides) apply_override(cfg, kv);
  return cfg;
}

std::string fmt_num(double v, int digits = 8) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

template <class Traj>
void plot_trajectory(const Context& c, const Traj& traj, const std::string& name,
                     const std::string& title, std::optional<double> eps,
                     std::optional<double> U_bar) {
  render_plot(trajectory_panels(traj, eps, U_bar), c.path(name), title);
  c.written(c.path(name));
}

int cmd_equilibria(const Context& c) {
  const double u = c.o.control == "off" ? 0.0 : parse_control_spec(c.o.control, 1.0)(0.0);
  c.out << "K = " << fmt_num(c.p.K()) << '\n'
        << "R0 = " << fmt_num(c.d.R0) << '\n'
        << "U* = " << fmt_num(c.d.Ustar) << '\n'
        << "E_bar = " << fmt_num(c.d.E_bar) << '\n'
        << "M_bar = " << fmt_num(c.d.M_bar) << '\n'
        << "F_bar = " << fmt_num(c.d.F_bar) << '\n'
        << "u = " << fmt_num(u) << '\n';
  const char* names[] = {"stable", "unstable", "marginal"};
  for (const Equilibrium& eq : equilibria_and_stability(c.p, u)) {
    c.out << "equilibrium (E, M, F, Ms) = (" << fmt_num(eq.state.E) << ", " << fmt_num(eq.state.M)
          << ", " << fmt_num(eq.state.F) << ", " << fmt_num(eq.state.Ms) << ") "
          << names[static_cast<int>(eq.stability)] << "; eigenvalues:";
    for (const auto& l : eq.eigenvalues) {
      c.out << ' ' << fmt_num(l.real());
      if (l.imag() != 0.0) c.out << (l.imag() > 0 ? "+" : "") << fmt_num(l.imag()) << 'i';
    }
    c.out << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Context& c) {
  const double T = c.T(200.0);
  const ControlSchedule u = parse_control_spec(c.o.control, T);
  const bool reduced = c.o.model == "reduced" || c.o.model == "both";
  const bool full = c.o.model == "full" || c.o.model == "both";
  if (!reduced && !full) throw Error(ErrorCode::kInvalidParameter, "--model reduced|full|both");
  std::optional<ReducedTrajectory> r;
  std::optional<FullTrajectory> f;
  if (reduced) {
    r.emplace(integrate(c.p, reduced_equilibrium(c.p), u, c.tol()));
    export_trajectory_csv(*r, c.path("simulate_reduced.csv"));
    c.written(c.path("simulate_reduced.csv"));
    c.out << "F(T) reduced = " << fmt_num(r->terminal().F) << '\n';
    if (c.o.plot) plot_trajectory(c, *r, "simulate_reduced.svg", "Reduced model", {}, {});
  }
  if (full) {
    f.emplace(integrate(c.p, full_equilibrium(c.p), u, c.tol()));
    export_trajectory_csv(*f, c.path("simulate_full.csv"));
    c.written(c.path("simulate_full.csv"));
    c.out << "F(T) full = " << fmt_num(f->terminal().F) << '\n';
    if (c.o.plot) plot_trajectory(c, *f, "simulate_full.svg", "Full model", {}, {});
  }
  if (r && f) {
    CsvTable t{{"t", "F_reduced", "F_full", "u"}, {}};
    for (double x : sample_times(u)) t.rows.push_back({x, r->sample(x).F, f->sample(x).F, u(x)});
    write_csv(t, c.path("compare.csv"));
    c.written(c.path("compare.csv"));
    c.out << "relative sup-norm gap = " << fmt_num(relative_sup_gap(*r, *f), 6) << '\n';
  }
  return kExitOk;
}

int cmd_compare_models(const Context& c) {
  const double T = c.T(70.0);
  struct Case {
    std::string name;
    std::string control;
  };
  std::vector<Panel> panels;
  for (const Case& k : {Case{"const", "const:15000"}, Case{"pulse", "pulse:20000:10:1"}}) {
    const ControlSchedule u = parse_control_spec(k.control, T);
    const ReducedTrajectory r = integrate(c.p, reduced_equilibrium(c.p), u, c.tol());
    const FullTrajectory f = integrate(c.p, full_equilibrium(c.p), u, c.tol());
    CsvTable t{{"t", "F_reduced", "F_full", "Ms_reduced", "Ms_full", "u"}, {}};
    Panel panel{"Females under " + k.control, "t (days)", "F", {}, {}};
    Series sr{"reduced", {}, {}, "", false}, sf{"full", {}, {}, "", true};
    for (double x : sample_times(u)) {
      const ReducedState a = r.sample(x);
      const FullState b = f.sample(x);
      t.rows.push_back({x, a.F, b.F, a.Ms, b.Ms, u(x)});
    }
    for (double x : sample_times(u, 0.1)) {
      sr.x.push_back(x), sr.y.push_back(r.sample(x).F);
      sf.x.push_back(x), sf.y.push_back(f.sample(x).F);
    }
    panel.series = {sr, sf};
    panels.push_back(panel);
    const std::string file = c.path("compare_" + k.name + ".csv");
    write_csv(t, file);
    c.written(file);
    c.out << k.name << " relative sup-norm gap = " << fmt_num(relative_sup_gap(r, f), 6) << '\n';
  }
  if (c.o.plot) {
    render_plot(panels, c.path("compare.svg"), "Reduced vs full model");
    c.written(c.path("compare.svg"));
  }
  return kExitOk;
}

int cmd_plan(const Context& c) {
  ProblemSpec s = c.spec(200.0);
  PlanOptions po;
  po.tol = c.tol();
  const PlanResult r = plan_release(c.p, s, po);
  export_trajectory_csv(r.trajectory, c.path("plan.csv"));
  c.written(c.path("plan.csv"));
  c.out << "J = " << fmt_num(r.J) << '\n'
        << "t0 = " << fmt_num(r.t0) << '\n'
        << "t1 = " << fmt_num(r.t1) << '\n'
        << "T_opt = " << fmt_num(r.active_duration()) << '\n'
        << "F(T) = " << fmt_num(r.F_terminal) << '\n'
        << "epsilon = " << fmt_num(s.epsilon) << '\n'
        << "iterations = " << r.iterations << '\n'
        << "max rate = " << fmt_num(r.diagnostics.max_rate) << '\n';
  if (r.diagnostics.bound_exceeded) {
    c.err << "warning: singular rate exceeds U_bar (" << fmt_num(r.diagnostics.max_rate)
          << " > " << fmt_num(s.U_bar) << ")\n";
  }
  if (c.o.plot) plot_trajectory(c, r.trajectory, "plan.svg", "Planned release", s.epsilon, s.U_bar);
  return kExitOk;
}

template <class Traj>
void write_optimized(const Context& c, const Traj& traj, const OptimizationResult& r,
                     const std::string& stem) {
  export_trajectory_csv(traj, c.path(stem + ".csv"));
  c.written(c.path(stem + ".csv"));
  if (c.o.plot) {
    plot_trajectory(c, traj, stem + ".svg", "Direct method (" + r.structure.pattern + ")",
                    r.objective == Objective::kTerminalBudget ? std::optional<double>{}
                                                              : std::optional<double>{r.epsilon},
                    r.U_bar);
  }
}

int report_optimized(const Context& c, const OptimizationResult& r, const std::string& stem) {
  if (r.model == ModelKind::kReduced) {
    write_optimized(c, integrate(c.p, reduced_equilibrium(c.p), r.schedule(), c.tol()), r, stem);
  } else {
    write_optimized(c, integrate(c.p, full_equilibrium(c.p), r.schedule(), c.tol()), r, stem);
  }
  c.out << "J = " << fmt_num(r.J) << '\n'
        << "F(T) = " << fmt_num(r.F_terminal) << '\n'
        << "lambda = " << fmt_num(r.lambda) << '\n'
        << "structure = " << r.structure.pattern << '\n'
        << "t0 = " << fmt_num(r.structure.t0) << '\n'
        << "t1 = " << fmt_num(r.structure.t1) << '\n'
        << "iterations = " << r.outer_iterations << " outer, " << r.inner_iterations << " inner\n"
        << "converged = " << (r.converged ? "yes" : "no") << '\n';
  if (!r.converged) {
    c.err << "error: " << to_string(ErrorCode::kMaxIterations)
          << ": optimizer stopped before convergence (stationarity " << fmt_num(r.stationarity, 3)
          << ")\n";
    return exit_code_for(ErrorCode::kMaxIterations);
  }
  return kExitOk;
}

int cmd_optimize(const Context& c) {
  ProblemSpec s = c.spec(200.0);
  DirectOptions d;
  d.cells = c.o.grid;
  d.tol = c.tol();
  return report_optimized(c, solve_direct(c.p, s, d), "optimize");
}

int cmd_dual(const Context& c) {
  if (!c.o.budget) throw Error(ErrorCode::kInvalidParameter, "dual needs --budget C");
  DirectOptions d;
  d.cells = c.o.grid;
  d.tol = c.tol();
  const OptimizationResult r =
      solve_budget_dual(c.p, c.single_model(), c.T(200.0), c.o.U_bar, *c.o.budget, d);
  return report_optimized(c, r, "dual");
}

int cmd_sweep(const Context& c) {
  ProblemSpec s;
  s.T = c.T(200.0);
  s.U_bar = c.o.U_bar;
  SweepOptions so;
  so.eps_frac = c.o.eps_frac.value_or(0.25);
  if (c.o.eps) throw Error(ErrorCode::kInvalidParameter, "sweep takes --eps-frac, not --eps");
  so.direct_reduced = so.direct_full = !c.o.plan_only;
  so.plan.tol = so.direct.tol = c.tol();
  so.direct.cells = c.o.grid;
  const std::vector<SweepRow> rows = sweep(build_config(c.o), c.o.nu_grid, s, so);
  write_text(c.path("sweep.csv"), format_sweep_csv(rows));
  c.written(c.path("sweep.csv"));
  for (const SweepRow& r : rows) {
    c.out << "nu_E = " << fmt_num(r.nu_E) << ": J_plan = " << fmt_num(r.J_plan, 6)
          << ", T_opt = " << fmt_num(r.T_opt_plan, 5);
    if (!c.o.plan_only) {
      c.out << ", J_direct = " << fmt_num(r.J_direct_reduced, 6) << " / "
            << fmt_num(r.J_direct_full, 6) << " (reduced / full)";
    }
    c.out << " [" << r.status << "]\n";
  }
  if (c.o.plot) {
    Panel pj{"Cost vs hatching rate", "nu_E", "J", {}, {}};
    Series a{"planner", {}, {}, "", false}, b{"direct reduced", {}, {}, "", true},
        f{"direct full", {}, {}, "", true};
    for (const SweepRow& r : rows) {
      a.x.push_back(r.nu_E), a.y.push_back(r.J_plan);
      b.x.push_back(r.nu_E), b.y.push_back(r.J_direct_reduced);
      f.x.push_back(r.nu_E), f.y.push_back(r.J_direct_full);
    }
    pj.series.push_back(a);
    if (!c.o.plan_only) pj.series.push_back(b), pj.series.push_back(f);
    render_plot({pj}, c.path("sweep.svg"));
    c.written(c.path("sweep.svg"));
  }
  const bool failed = std::any_of(rows.begin(), rows.end(),
                                  [](const SweepRow& r) { return r.status != "ok"; });
  return failed ? kExitInfeasible : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal sterile-male release planning"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--params", o.params, "parameter file (key = value lines)");
    sub->add_option("--set", o.overrides, "override a parameter, key=value (repeatable)");
    sub->add_option("--T", o.T, "horizon in days")->check(CLI::PositiveNumber);
    sub->add_option("--Ubar", o.U_bar, "maximal release rate")->check(CLI::PositiveNumber);
    auto* frac = sub->add_option("--eps-frac", o.eps_frac, "target as a fraction of F_bar");
    auto* abs = sub->add_option("--eps", o.eps, "absolute female target");
    frac->excludes(abs);
    sub->add_option("--model", o.model, "reduced | full | both")
        ->check(CLI::IsMember({"reduced", "full", "both"}));
    sub->add_option("--grid", o.grid, "control cells of the direct method");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_flag("--plot", o.plot, "also write SVG figures");
    sub->add_option("--tol-rel", o.tol_rel, "relative ODE tolerance");
    sub->add_option("--budget", o.budget, "release budget for the dual problem");
    sub->add_option("--objective", o.objective, "l1 | l2")->check(CLI::IsMember({"l1", "l2"}));
    sub->add_option("--u", o.control, "control: off | const:V | pulse:A:period:width");
  };
  using Command = int (*)(const Context&);
  std::vector<std::pair<CLI::App*, Command>> commands;
  auto add = [&](const char* name, const char* help, Command fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    commands.emplace_back(sub, fn);
    return sub;
  };
  add("simulate", "integrate the model under a given control", cmd_simulate);
  add("equilibria", "equilibria, thresholds and eigenvalues", cmd_equilibria);
  add("plan", "Off-Singular-Off release by bisection on the singular arc", cmd_plan);
  add("optimize", "direct projected-gradient optimization", cmd_optimize);
  add("dual", "minimize F(T) under a release budget", cmd_dual);
  CLI::App* sw = add("sweep", "costs over a grid of hatching rates", cmd_sweep);
  sw->add_option("--nu-grid", o.nu_grid, "nu_E values")->delimiter(',');
  sw->add_flag("--plan-only", o.plan_only, "skip the direct method");
  add("compare-models", "reduced vs full model under the two reference controls",
      cmd_compare_models);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (o.grid < 1) throw Error(ErrorCode::kInvalidParameter, "--grid must be positive");
    std::filesystem::create_directories(o.out_dir);
    const Params p = build_params(o);
    const Context ctx{o, out, err, p, derive_quantities(p)};
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(ctx);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sitopt

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

#include <optional>
#include <string>
#include <vector>

#include "sitopt/config.hpp"
#include "sitopt/optimizer.hpp"

namespace sitopt {

// ---- CSV ------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Values at 10 significant digits, LF line endings.
std::string format_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
void write_csv(const CsvTable& table, const std::string& path);
CsvTable read_csv(const std::string& path);

/// Multiples of `step` below T, T itself, and every control-segment boundary.
std::vector<double> sample_times(const ControlSchedule& u, double step = 0.5);

/// Columns t,F,Ms,u (reduced) or t,E,M,F,Ms,u (full) on sample_times.
CsvTable trajectory_table(const ReducedTrajectory& traj);
CsvTable trajectory_table(const FullTrajectory& traj);

template <class State>
void export_trajectory_csv(const Trajectory<State>& traj, const std::string& path) {
  write_csv(trajectory_table(traj), path);
}

/// Text file helpers; failures raise Io with the system message.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// ---- SVG ------------------------------------------------------------------

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // empty: palette
  bool dashed = false;
};

/// Dashed horizontal reference line (epsilon, U_bar ...).
struct Marker {
  std::string label;
  double y;
};

struct Panel {
  std::string title;
  std::string x_label = "t (days)";
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> markers;
};

/// Panels stacked vertically in one standalone SVG document.
/// Throws InvalidParameter when no panel carries a series.
std::string render_svg(const std::vector<Panel>& panels, const std::string& title = "");
void render_plot(const std::vector<Panel>& panels, const std::string& path,
                 const std::string& title = "");

/// Female/sterile/control panels for a trajectory; markers are drawn when given.
std::vector<Panel> trajectory_panels(const ReducedTrajectory& traj,
                                     std::optional<double> epsilon = std::nullopt,
                                     std::optional<double> U_bar = std::nullopt);
std::vector<Panel> trajectory_panels(const FullTrajectory& traj,
                                     std::optional<double> epsilon = std::nullopt,
                                     std::optional<double> U_bar = std::nullopt);

// ---- nu_E sweep -------------------------------------------------------------

struct SweepOptions {
  double eps_frac = 0.25;  // epsilon = eps_frac * F_bar of each row
  bool direct_reduced = true;
  bool direct_full = true;
  PlanOptions plan{};
  DirectOptions direct{};
};

/// One nu_E value; NaN where a method was skipped or failed.
struct SweepRow {
  double nu_E = 0.0;
  double J_plan = 0.0;
  double J_direct_reduced = 0.0;
  double J_direct_full = 0.0;
  double T_opt_plan = 0.0;
  double T_opt_direct_reduced = 0.0;
  double T_opt_direct_full = 0.0;
  std::string status = "ok";  // first failure, as an error-code name
};

/// Rows are independent and run in parallel (OpenMP); per-row failures are
/// recorded and the sweep continues. `spec` supplies T, U_bar and the model
/// settings; its epsilon is replaced per row.
std::vector<SweepRow> sweep(const ParamConfig& base, const std::vector<double>& nu_grid,
                            const ProblemSpec& spec, const SweepOptions& opt = {});
/// Serial reference of sweep().
std::vector<SweepRow> sweep_serial(const ParamConfig& base, const std::vector<double>& nu_grid,
                                   const ProblemSpec& spec, const SweepOptions& opt = {});

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sitopt

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
#include <filesystem>
#include <random>

#include "sitopt/errors.hpp"
#include "sitopt/report.hpp"
#include "support.hpp"

namespace sitopt {
namespace {

namespace fs = std::filesystem;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "nothing thrown";
  return ErrorCode::kInvalidParameter;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sitopt_test_report";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Config, ParsesKeyValueText) {
  const ParamConfig c = parse_config(
      "# reference set\n"
      "beta_E = 12.5\n"
      "  nu_E=0.1   # trailing comment\n"
      "\n"
      "anchor = \"M_bar\"\n"
      "anchor_value = 4000\n");
  EXPECT_EQ(c.bio.beta_E, 12.5);
  EXPECT_EQ(c.bio.nu_E, 0.1);
  EXPECT_EQ(c.bio.delta_F, Biology{}.delta_F);
  EXPECT_EQ(c.anchor, Anchor::kMBar);
  EXPECT_EQ(c.anchor_value, 4000.0);
  const DerivedQuantities d = derive_quantities(c.build());
  EXPECT_NEAR(d.M_bar, 4000.0, 1e-9 * 4000.0);
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of([] { parse_config("mystery = 1\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_config("nu_E = fast\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_config("just words\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_config("anchor = K\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { load_config("/nonexistent/params.toml"); }), ErrorCode::kIo);
  ParamConfig c;
  EXPECT_EQ(code_of([&] { apply_override(c, "nu_E"); }), ErrorCode::kConfig);
  // a syntactically fine file can still violate the persistence hypothesis
  ParamConfig bad = parse_config("delta_s = 0.05\n");
  EXPECT_EQ(code_of([&] { bad.build(); }), ErrorCode::kHypothesisViolation);
}

TEST(Config, OverridesApplyOnTopOfFile) {
  const fs::path path = scratch("params.toml");
  write_text(path.string(), "nu_E = 0.1\ngamma_s = 0.5\n");
  ParamConfig c = load_config(path.string());
  apply_override(c, "nu_E=0.2");
  apply_override(c, " delta_s = 0.15 ");
  EXPECT_EQ(c.bio.nu_E, 0.2);
  EXPECT_EQ(c.bio.gamma_s, 0.5);
  EXPECT_EQ(c.bio.delta_s, 0.15);
  EXPECT_EQ(std::string(anchor_name(c.anchor)), "F_bar");
}

TEST(Csv, RoundTripIsByteIdentical) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    CsvTable t;
    t.header = {"t", "F", "Ms", "u"};
    for (int i = 0; i < 50; ++i) {
      t.rows.push_back({0.5 * i, testing::uniform(rng, 0, 2e4), testing::uniform(rng, 0, 1e5),
                        std::pow(10.0, testing::uniform(rng, -12, 6))});
    }
    const std::string text = format_csv(t);
    EXPECT_EQ(format_csv(parse_csv(text)), text);
    EXPECT_EQ(text.find('\r'), std::string::npos);
  }
  const fs::path path = scratch("rt.csv");
  CsvTable t{{"a", "b"}, {{1.0, 2.5}, {-3.0, 1e-300}}};
  write_csv(t, path.string());
  EXPECT_EQ(format_csv(read_csv(path.string())), format_csv(t));
  EXPECT_EQ(read_text(path.string()), "a,b\n1,2.5\n-3,1e-300\n");
  EXPECT_EQ(code_of([] { read_csv("/nonexistent/x.csv"); }), ErrorCode::kIo);
}

TEST(Csv, TrajectorySamplingIncludesBoundaries) {
  const Params p = testing::reference_params();
  const ControlSchedule u = ControlSchedule::pulses(10.25, 1000.0, 3.3, 1.1);
  const CsvTable t = trajectory_table(integrate(p, reduced_equilibrium(p), u));
  ASSERT_EQ(t.header, (std::vector<std::string>{"t", "F", "Ms", "u"}));
  std::vector<double> ts;
  for (const auto& r : t.rows) ts.push_back(r[0]);
  EXPECT_TRUE(std::is_sorted(ts.begin(), ts.end()));
  EXPECT_EQ(std::adjacent_find(ts.begin(), ts.end()), ts.end());
  EXPECT_EQ(ts.front(), 0.0);
  EXPECT_EQ(ts.back(), 10.25);
  // 21 half-day points in [0, 10.25) plus T plus pulse edges at 1.1, 3.3, 4.4, 6.6, 7.7, 9.9
  EXPECT_EQ(ts.size(), 21u + 1u + 6u);
  const std::size_t n_expected =
      static_cast<std::size_t>(std::ceil(10.25 / 0.5)) + 1 + 6;
  EXPECT_EQ(ts.size(), n_expected);
}

TEST(Csv, EquilibriumColumnsAreConstant) {
  const Params p = testing::reference_params();
  const FullState eq = full_equilibrium(p);
  const CsvTable t = trajectory_table(integrate(p, eq, ControlSchedule::off(30.0)));
  ASSERT_EQ(t.header.size(), 6u);
  ASSERT_EQ(t.rows.size(), 61u);
  for (const auto& r : t.rows) {
    EXPECT_NEAR(r[1], eq.E, 1e-8 * eq.E);
    EXPECT_NEAR(r[2], eq.M, 1e-8 * eq.M);
    EXPECT_NEAR(r[3], eq.F, 1e-8 * eq.F);
    EXPECT_EQ(r[4], 0.0);
    EXPECT_EQ(r[5], 0.0);
  }
}

TEST(Svg, RendersPanelsMarkersAndFlatControl) {
  const Params p = testing::reference_params();
  const auto traj = integrate(p, reduced_equilibrium(p), ControlSchedule::off(50.0));
  const std::string svg = render_svg(trajectory_panels(traj, 2759.25, 5000.0), "no release");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("no release"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);  // epsilon / U_bar markers
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
  Panel empty;
  empty.title = "nothing";
  EXPECT_EQ(code_of([&] { render_svg({empty}); }), ErrorCode::kInvalidParameter);
  const fs::path path = scratch("plot.svg");
  render_plot(trajectory_panels(traj), path.string());
  EXPECT_EQ(read_text(path.string()), render_svg(trajectory_panels(traj)));
}

TEST(Sweep, ParallelMatchesSerial) {
  ProblemSpec spec;
  SweepOptions opt;
  opt.direct_reduced = false;
  opt.direct_full = false;
  const std::vector<double> grid{0.005, 0.02, 0.05, 0.1, 0.15, 0.25};
  const auto a = sweep(ParamConfig{}, grid, spec, opt);
  const auto b = sweep_serial(ParamConfig{}, grid, spec, opt);
  ASSERT_EQ(a.size(), grid.size());
  EXPECT_EQ(format_sweep_csv(a), format_sweep_csv(b));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].nu_E, grid[i]);
    EXPECT_EQ(a[i].status, "ok");
    EXPECT_GT(a[i].J_plan, 0.0);
    EXPECT_TRUE(std::isnan(a[i].J_direct_full));
  }
  const std::string csv = format_sweep_csv(a);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), grid.size() + 1);
  EXPECT_EQ(csv.rfind("nu_E,J_plan,", 0), 0u);
}

TEST(Sweep, FailuresStayInTheirRow) {
  ProblemSpec spec;
  spec.T = 60.0;
  SweepOptions opt;
  opt.direct_reduced = false;
  opt.direct_full = false;
  const auto rows = sweep(ParamConfig{}, {0.05, 0.1}, spec, opt);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.status, "InfeasibleHorizon");
    EXPECT_TRUE(std::isnan(r.J_plan));
  }
  EXPECT_EQ(code_of([&] { sweep(ParamConfig{}, {0.3}, spec, opt); }),
            ErrorCode::kInvalidParameter);
}

}  // namespace
}  // namespace sitopt

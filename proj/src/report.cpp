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

#include "sitopt/report.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace sitopt {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path + ": " + std::strerror(errno));
  f << text;
  f.flush();
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path + ": " + std::strerror(errno));
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out += ',';
    out += table.header[j];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += num(row[j]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIo, "empty CSV");
  t.header = split(line, ',');
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      throw Error(ErrorCode::kIo, "CSV line " + std::to_string(lineno) + " has " +
                                      std::to_string(cells.size()) + " fields, expected " +
                                      std::to_string(t.header.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') {
        throw Error(ErrorCode::kIo, "CSV line " + std::to_string(lineno) + ": bad number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const CsvTable& table, const std::string& path) {
  write_text(path, format_csv(table));
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text(path)); }

std::vector<double> sample_times(const ControlSchedule& u, double step) {
  const double T = u.horizon();
  std::vector<double> t;
  for (long k = 0;; ++k) {
    const double x = static_cast<double>(k) * step;
    if (x >= T) break;
    t.push_back(x);
  }
  t.push_back(T);
  for (double b : u.boundaries()) t.push_back(b);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

CsvTable trajectory_table(const ReducedTrajectory& traj) {
  CsvTable t{{"t", "F", "Ms", "u"}, {}};
  for (double x : sample_times(traj.control())) {
    const ReducedState s = traj.sample(x);
    t.rows.push_back({x, s.F, s.Ms, traj.control()(x)});
  }
  return t;
}

CsvTable trajectory_table(const FullTrajectory& traj) {
  CsvTable t{{"t", "E", "M", "F", "Ms", "u"}, {}};
  for (double x : sample_times(traj.control())) {
    const FullState s = traj.sample(x);
    t.rows.push_back({x, s.E, s.M, s.F, s.Ms, traj.control()(x)});
  }
  return t;
}

// ---- SVG ------------------------------------------------------------------

namespace {

constexpr double kWidth = 820.0;
constexpr double kPanelHeight = 250.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 45.0;
constexpr double kHeader = 30.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, const char* f = "%.2f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> t;
  for (double x = std::ceil(lo / step) * step; x <= hi + 1e-9 * step; x += step) {
    t.push_back(std::abs(x) < 1e-12 * step ? 0.0 : x);
  }
  return t;
}

void draw_panel(std::ostringstream& os, const Panel& p, double y0) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : p.series) {
    for (double x : s.x) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    for (double y : s.y) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
  }
  for (const Marker& m : p.markers) ymin = std::min(ymin, m.y), ymax = std::max(ymax, m.y);
  if (!(xmax > xmin)) xmin -= 0.5, xmax += 0.5;
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (!(ymax > ymin)) {
    const double pad = ymin == 0.0 ? 1.0 : 0.1 * std::abs(ymin);
    ymin -= pad;
    ymax += pad;
  } else {
    const double pad = 0.05 * (ymax - ymin);
    ymin = ymin >= 0.0 && ymin - pad < 0.0 ? 0.0 : ymin - pad;
    ymax += pad;
  }
  const double w = kWidth - kLeft - kRight;
  const double h = kPanelHeight - kTop - kBottom;
  const double top = y0 + kTop;
  auto X = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * w; };
  auto Y = [&](double y) { return top + (ymax - y) / (ymax - ymin) * h; };

  os << "<g>\n";
  os << "<text x=\"" << fmt(kLeft + w / 2) << "\" y=\"" << fmt(y0 + 20)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(p.title) << "</text>\n";
  os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(w)
     << "\" height=\"" << fmt(h) << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (double t : nice_ticks(xmin, xmax)) {
    os << "<line x1=\"" << fmt(X(t)) << "\" y1=\"" << fmt(top + h) << "\" x2=\"" << fmt(X(t))
       << "\" y2=\"" << fmt(top + h + 5) << "\" stroke=\"#000\"/>";
    os << "<text x=\"" << fmt(X(t)) << "\" y=\"" << fmt(top + h + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t, "%g") << "</text>\n";
  }
  for (double t : nice_ticks(ymin, ymax)) {
    os << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(Y(t)) << "\" x2=\"" << fmt(kLeft)
       << "\" y2=\"" << fmt(Y(t)) << "\" stroke=\"#000\"/>";
    os << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(Y(t) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t, "%g") << "</text>\n";
  }
  os << "<text x=\"" << fmt(kLeft + w / 2) << "\" y=\"" << fmt(top + h + 38)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(p.x_label) << "</text>\n";
  os << "<text transform=\"translate(" << fmt(20) << "," << fmt(top + h / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(p.y_label)
     << "</text>\n";

  for (const Marker& m : p.markers) {
    os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(Y(m.y)) << "\" x2=\"" << fmt(kLeft + w)
       << "\" y2=\"" << fmt(Y(m.y)) << "\" stroke=\"#555\" stroke-dasharray=\"6,4\"/>";
    os << "<text x=\"" << fmt(kLeft + w + 6) << "\" y=\"" << fmt(Y(m.y) + 4)
       << "\" font-size=\"11\" fill=\"#555\">" << escape(m.label) << "</text>\n";
  }

  double legend_y = top + 30;
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const Series& s = p.series[k];
    const std::string color = s.color.empty() ? kPalette[k % std::size(kPalette)] : s.color;
    const std::string dash = s.dashed ? " stroke-dasharray=\"4,3\"" : "";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash
       << " points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (i) os << ' ';
      os << fmt(X(s.x[i])) << ',' << fmt(Y(s.y[i]));
    }
    os << "\"/>\n";
    os << "<line x1=\"" << fmt(kLeft + w + 6) << "\" y1=\"" << fmt(legend_y) << "\" x2=\""
       << fmt(kLeft + w + 30) << "\" y2=\"" << fmt(legend_y) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"" << dash << "/>";
    os << "<text x=\"" << fmt(kLeft + w + 34) << "\" y=\"" << fmt(legend_y + 4)
       << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  os << "</g>\n";
}

template <class State, class Get>
Series state_series(const Trajectory<State>& traj, const std::string& label, Get get) {
  Series s{label, {}, {}, "", false};
  for (double t : sample_times(traj.control(), 0.25)) {
    s.x.push_back(t);
    s.y.push_back(get(traj.sample(t)));
  }
  return s;
}

// Control drawn with vertical jumps at segment boundaries.
Series control_series(const ControlSchedule& u) {
  Series s{"u (sterile release)", {}, {}, "#2ca02c", false};
  const auto& segs = u.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double a = segs[i].t_start, b = segs[i].t_end;
    const long n = std::max<long>(1, static_cast<long>(std::ceil((b - a) / 0.25)));
    for (long k = 0; k <= n; ++k) {
      const double t = k == n ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n);
      s.x.push_back(t);
      s.y.push_back(u.value_in(i, t));
    }
  }
  return s;
}

template <class State>
std::vector<Panel> panels_for(const Trajectory<State>& traj, std::optional<double> epsilon,
                              std::optional<double> U_bar) {
  Panel females{"Wild females", "t (days)", "F", {}, {}};
  females.series.push_back(state_series(traj, "F", [](const State& s) { return s.F; }));
  if constexpr (std::is_same_v<State, FullState>) {
    females.title = "Wild adults";
    females.series.push_back(state_series(traj, "M", [](const State& s) { return s.M; }));
    females.y_label = "individuals";
  }
  if (epsilon) females.markers.push_back(Marker{"eps = " + fmt(*epsilon, "%.6g"), *epsilon});
  Panel sterile{"Sterile males", "t (days)", "Ms", {}, {}};
  sterile.series.push_back(state_series(traj, "Ms", [](const State& s) { return s.Ms; }));
  Panel control{"Release rate", "t (days)", "u", {control_series(traj.control())}, {}};
  if (U_bar) control.markers.push_back(Marker{"U_bar = " + fmt(*U_bar, "%.6g"), *U_bar});
  return {females, sterile, control};
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, const std::string& title) {
  const bool any = std::any_of(panels.begin(), panels.end(),
                               [](const Panel& p) { return !p.series.empty(); });
  if (!any) throw Error(ErrorCode::kInvalidParameter, "plot needs at least one series");
  const double header = title.empty() ? 0.0 : kHeader;
  const double height = header + kPanelHeight * static_cast<double>(panels.size());
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth, "%.0f")
     << "\" height=\"" << fmt(height, "%.0f") << "\" viewBox=\"0 0 " << fmt(kWidth, "%.0f") << ' '
     << fmt(height, "%.0f") << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">"
       << escape(title) << "</text>\n";
  }
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(os, panels[i], header + kPanelHeight * static_cast<double>(i));
  }
  os << "</svg>\n";
  return os.str();
}

void render_plot(const std::vector<Panel>& panels, const std::string& path,
                 const std::string& title) {
  write_text(path, render_svg(panels, title));
}

std::vector<Panel> trajectory_panels(const ReducedTrajectory& traj, std::optional<double> epsilon,
                                     std::optional<double> U_bar) {
  return panels_for(traj, epsilon, U_bar);
}

std::vector<Panel> trajectory_panels(const FullTrajectory& traj, std::optional<double> epsilon,
                                     std::optional<double> U_bar) {
  return panels_for(traj, epsilon, U_bar);
}

}  // namespace sitopt

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

#include "sitopt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sitopt/errors.hpp"

namespace sitopt {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double to_number(const std::string& key, const std::string& value) {
  double x = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::kConfig, "value for '" + key + "' is not a number: " + value);
  }
  return x;
}

}  // namespace

const char* anchor_name(Anchor a) {
  switch (a) {
    case Anchor::kEBar: return "E_bar";
    case Anchor::kMBar: return "M_bar";
    case Anchor::kFBar: return "F_bar";
  }
  return "?";
}

void apply_setting(ParamConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = unquote(trim(raw_value));
  if (key == "anchor" || key == "calibration_anchor") {
    if (value == "E_bar") cfg.anchor = Anchor::kEBar;
    else if (value == "M_bar") cfg.anchor = Anchor::kMBar;
    else if (value == "F_bar") cfg.anchor = Anchor::kFBar;
    else throw Error(ErrorCode::kConfig, "anchor must be E_bar, M_bar or F_bar, got " + value);
    return;
  }
  double* slot = nullptr;
  Biology& b = cfg.bio;
  if (key == "beta_E") slot = &b.beta_E;
  else if (key == "nu_E") slot = &b.nu_E;
  else if (key == "delta_E") slot = &b.delta_E;
  else if (key == "delta_M") slot = &b.delta_M;
  else if (key == "delta_F") slot = &b.delta_F;
  else if (key == "delta_s") slot = &b.delta_s;
  else if (key == "nu") slot = &b.nu;
  else if (key == "gamma_s") slot = &b.gamma_s;
  else if (key == "anchor_value") slot = &cfg.anchor_value;
  if (!slot) throw Error(ErrorCode::kConfig, "unknown parameter key '" + key + "'");
  *slot = to_number(key, value);
}

void apply_override(ParamConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::kConfig, "override must look like key=value: " + assignment);
  }
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ParamConfig parse_config(const std::string& text, ParamConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' inside a quoted value never occurs for these keys
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ParamConfig load_config(const std::string& path, ParamConfig base) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot read parameter file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), base);
}

}  // namespace sitopt

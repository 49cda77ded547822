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

#include <string>

#include "sitopt/params.hpp"

namespace sitopt {

/// Biology plus the calibration anchor, as read from a parameter file.
struct ParamConfig {
  Biology bio{};
  Anchor anchor = Anchor::kFBar;
  double anchor_value = 11037.0;

  /// Calibrated, validated parameters.
  Params build() const { return calibrate_capacity(bio, anchor, anchor_value); }
};

/// Applies one `key = value` assignment. Keys: beta_E, nu_E, delta_E,
/// delta_M, delta_F, delta_s, nu, gamma_s, anchor (E_bar | M_bar | F_bar),
/// anchor_value. `calibration_anchor` is accepted for `anchor`.
/// Throws Config on unknown keys or unparsable values.
void apply_setting(ParamConfig& cfg, const std::string& key, const std::string& value);

/// Same, from a single "key=value" string (command-line overrides).
void apply_override(ParamConfig& cfg, const std::string& assignment);

/// Parses flat TOML-style text: one `key = value` per line, `#` comments,
/// optional double quotes around string values.
ParamConfig parse_config(const std::string& text, ParamConfig base = {});

/// Reads and parses a parameter file. Throws Io if it cannot be read.
ParamConfig load_config(const std::string& path, ParamConfig base = {});

const char* anchor_name(Anchor a);

}  // namespace sitopt

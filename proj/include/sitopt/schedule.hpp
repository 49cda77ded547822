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

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace sitopt {

struct OffSegment {};

struct ConstantSegment {
  double rate;
};

/// Piecewise-linear rate through (t, rate) knots. Knot times are absolute and
/// the first/last knots coincide with the segment ends.
struct SampledSegment {
  std::vector<double> t;
  std::vector<double> rate;
};

struct Segment {
  double t_start;
  double t_end;
  std::variant<OffSegment, ConstantSegment, SampledSegment> kind;
};

/// Release rate u(t) on [0, T] as contiguous segments. Evaluation is total on
/// [0, T]; at an interior boundary the later segment wins, at T the last one.
class ControlSchedule {
 public:
  explicit ControlSchedule(std::vector<Segment> segments,
                           std::optional<double> upper_bound = std::nullopt);

  static ControlSchedule off(double T);
  static ControlSchedule constant(double T, double rate);
  /// One constant cell per value on a uniform grid of [0, T].
  static ControlSchedule piecewise_constant(double T, const std::vector<double>& values);
  /// `amplitude` on [k*period, k*period + width] for every k with
  /// k*period < T, zero elsewhere.
  static ControlSchedule pulses(double T, double amplitude, double period, double width);

  double horizon() const { return segments_.back().t_end; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::optional<double> upper_bound() const { return upper_bound_; }

  double operator()(double t) const;
  /// Evaluates segment `index`'s formula at t (no boundary ambiguity).
  double value_in(std::size_t index, double t) const;
  std::size_t segment_index(double t) const;

  /// Segment boundaries including 0 and T.
  std::vector<double> boundaries() const;
  /// Exact integral of u over [0, T].
  double integral() const;
  /// Exact integral of u over [a, b], clipped to [0, T].
  double integral(double a, double b) const;
  double max_rate() const;

 private:
  std::vector<Segment> segments_;
  std::optional<double> upper_bound_;
};

}  // namespace sitopt

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

#include "sitopt/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sitopt/errors.hpp"

namespace sitopt {
namespace {

double eval_sampled(const SampledSegment& s, double t) {
  if (t <= s.t.front()) return s.rate.front();
  if (t >= s.t.back()) return s.rate.back();
  const auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - s.t.begin());
  const double w = (t - s.t[j - 1]) / (s.t[j] - s.t[j - 1]);
  return s.rate[j - 1] + w * (s.rate[j] - s.rate[j - 1]);
}

}  // namespace

ControlSchedule::ControlSchedule(std::vector<Segment> segments, std::optional<double> upper_bound)
    : segments_(std::move(segments)), upper_bound_(upper_bound) {
  if (segments_.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "control schedule needs at least one segment");
  }
  if (segments_.front().t_start != 0.0) {
    throw Error(ErrorCode::kInvalidParameter, "control schedule must start at t = 0");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(s.t_end > s.t_start)) {
      throw Error(ErrorCode::kInvalidParameter, "segment " + std::to_string(i) + " is empty");
    }
    if (i > 0 && s.t_start != segments_[i - 1].t_end) {
      throw Error(ErrorCode::kInvalidParameter, "segments must be contiguous");
    }
    if (const auto* c = std::get_if<ConstantSegment>(&s.kind); c && !(c->rate >= 0.0)) {
      throw Error(ErrorCode::kInvalidParameter, "negative release rate");
    }
    if (const auto* sm = std::get_if<SampledSegment>(&s.kind)) {
      if (sm->t.size() < 2 || sm->t.size() != sm->rate.size()) {
        throw Error(ErrorCode::kInvalidParameter, "sampled segment needs matching knots");
      }
      if (!std::is_sorted(sm->t.begin(), sm->t.end())) {
        throw Error(ErrorCode::kInvalidParameter, "sampled knots must be increasing");
      }
      if (*std::min_element(sm->rate.begin(), sm->rate.end()) < 0.0) {
        throw Error(ErrorCode::kInvalidParameter, "negative release rate");
      }
    }
  }
  if (upper_bound_ && max_rate() > *upper_bound_ * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kInvalidParameter, "release rate exceeds the attached bound");
  }
}

ControlSchedule ControlSchedule::off(double T) {
  return ControlSchedule({Segment{0.0, T, OffSegment{}}});
}

ControlSchedule ControlSchedule::constant(double T, double rate) {
  return ControlSchedule({Segment{0.0, T, ConstantSegment{rate}}});
}

ControlSchedule ControlSchedule::piecewise_constant(double T, const std::vector<double>& values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "piecewise-constant control needs cells");
  }
  std::vector<Segment> segs;
  segs.reserve(values.size());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = T * static_cast<double>(i) / n;
    const double b = i + 1 == values.size() ? T : T * static_cast<double>(i + 1) / n;
    segs.push_back(Segment{a, b, ConstantSegment{values[i]}});
  }
  return ControlSchedule(std::move(segs));
}

ControlSchedule ControlSchedule::pulses(double T, double amplitude, double period, double width) {
  if (!(period > 0.0) || !(width > 0.0) || width > period) {
    throw Error(ErrorCode::kInvalidParameter, "pulse train needs 0 < width <= period");
  }
  std::vector<Segment> segs;
  double t = 0.0;
  for (int k = 0; t < T; ++k) {
    const double on_end = std::min(T, k * period + width);
    segs.push_back(Segment{t, on_end, ConstantSegment{amplitude}});
    const double off_end = std::min(T, (k + 1) * period);
    if (off_end > on_end) segs.push_back(Segment{on_end, off_end, OffSegment{}});
    t = off_end;
  }
  return ControlSchedule(std::move(segs));
}

std::size_t ControlSchedule::segment_index(double t) const {
  if (t <= 0.0) return 0;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t_start; });
  const std::size_t idx = static_cast<std::size_t>(it - segments_.begin());
  return idx == 0 ? 0 : idx - 1;
}

double ControlSchedule::value_in(std::size_t index, double t) const {
  const Segment& s = segments_[index];
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, OffSegment>) {
          return 0.0;
        } else if constexpr (std::is_same_v<K, ConstantSegment>) {
          return k.rate;
        } else {
          return eval_sampled(k, t);
        }
      },
      s.kind);
}

double ControlSchedule::operator()(double t) const {
  if (t < 0.0 || t > horizon()) {
    throw Error(ErrorCode::kOutOfRange, "control evaluated outside [0, T]");
  }
  return value_in(segment_index(t), t);
}

std::vector<double> ControlSchedule::boundaries() const {
  std::vector<double> b;
  b.reserve(segments_.size() + 1);
  for (const Segment& s : segments_) b.push_back(s.t_start);
  b.push_back(horizon());
  return b;
}

double ControlSchedule::integral() const { return integral(0.0, horizon()); }

double ControlSchedule::integral(double a, double b) const {
  double total = 0.0;
  for (const Segment& s : segments_) {
    const double lo = std::max(a, s.t_start);
    const double hi = std::min(b, s.t_end);
    if (!(hi > lo)) continue;
    if (const auto* c = std::get_if<ConstantSegment>(&s.kind)) {
      total += c->rate * (hi - lo);
    } else if (const auto* sm = std::get_if<SampledSegment>(&s.kind)) {
      for (std::size_t j = 1; j < sm->t.size(); ++j) {
        const double x0 = std::max(lo, sm->t[j - 1]);
        const double x1 = std::min(hi, sm->t[j]);
        if (!(x1 > x0)) continue;
        const double w = sm->t[j] - sm->t[j - 1];
        auto at = [&](double x) {
          return sm->rate[j - 1] + (sm->rate[j] - sm->rate[j - 1]) * (x - sm->t[j - 1]) / w;
        };
        total += 0.5 * (at(x0) + at(x1)) * (x1 - x0);
      }
    }
  }
  return total;
}

double ControlSchedule::max_rate() const {
  double m = 0.0;
  for (const Segment& s : segments_) {
    if (const auto* c = std::get_if<ConstantSegment>(&s.kind)) {
      m = std::max(m, c->rate);
    } else if (const auto* sm = std::get_if<SampledSegment>(&s.kind)) {
      m = std::max(m, *std::max_element(sm->rate.begin(), sm->rate.end()));
    }
  }
  return m;
}

}  // namespace sitopt

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

// Dormand-Prince 5(4) with its native 4th-order continuous extension.
//
// The integrator honours a list of mandatory breakpoints: no step straddles
// one, and the right-hand side is told which breakpoint interval it is being
// evaluated on, so piecewise controls are always evaluated on the correct
// side of a jump.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sitopt/errors.hpp"

namespace sitopt {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Relative tolerance, and absolute tolerance expressed as a fraction of the
/// per-component state scale.
struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

/// Breakpoint interval on which a right-hand side is being evaluated.
struct Interval {
  std::size_t index;
  double lo;
  double hi;
};

template <std::size_t N>
class DenseSolution {
 public:
  DenseSolution() = default;

  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }
  std::span<const double> mesh() const { return t_; }
  const std::vector<Vec<N>>& states() const { return y_; }
  const Vec<N>& back() const { return y_.back(); }
  std::size_t steps() const { return t_.size() - 1; }

  /// Dense-output evaluation. Mesh points return the stored state exactly.
  Vec<N> sample(double t) const {
    if (t < t_.front() || t > t_.back()) {
      throw Error(ErrorCode::kOutOfRange, "sample time " + std::to_string(t) +
                                              " outside [" + std::to_string(t_.front()) + ", " +
                                              std::to_string(t_.back()) + "]");
    }
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - t_.begin());
    if (k > 0 && t_[k - 1] == t) return y_[k - 1];
    if (k == t_.size()) return y_.back();
    --k;  // step k spans [t_k, t_{k+1}]
    const double h = t_[k + 1] - t_[k];
    const double theta = (t - t_[k]) / h;
    const double theta1 = 1.0 - theta;
    const auto& r = coeff_[k];
    Vec<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = y_[k][i] +
               theta * (r[0][i] + theta1 * (r[1][i] + theta * (r[2][i] + theta1 * r[3][i])));
    }
    return out;
  }

  // Used by the integrator to append accepted steps.
  void start(double t0, const Vec<N>& y0) {
    t_.assign(1, t0);
    y_.assign(1, y0);
    coeff_.clear();
  }
  void push(double t, const Vec<N>& y, const std::array<Vec<N>, 4>& c) {
    t_.push_back(t);
    y_.push_back(y);
    coeff_.push_back(c);
  }

 private:
  std::vector<double> t_;
  std::vector<Vec<N>> y_;
  std::vector<std::array<Vec<N>, 4>> coeff_;
};

template <std::size_t N>
struct OdeOptions {
  Tolerance tol{};
  Vec<N> scale{};               // per-component magnitude used for abs tol
  std::vector<double> breakpoints;  // interior mandatory mesh points
  std::size_t max_steps = 2'000'000;
  /// Called after every accepted step; may throw to abort.
  std::function<void(double, const Vec<N>&)> on_step;
};

namespace detail {

struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
  Vec<N> out = y;
  for (const auto& [w, k] : terms) {
    for (std::size_t i = 0; i < N; ++i) out[i] += h * w * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// Integrates y' = rhs(t, y, interval) from t0 to t1. `rhs` must be callable
/// as Vec<N>(double, const Vec<N>&, const Interval&).
template <std::size_t N, class Rhs>
DenseSolution<N> integrate_ode(Rhs&& rhs, const Vec<N>& y0, double t0, double t1,
                               const OdeOptions<N>& opt) {
  using C = detail::Dopri5;
  if (!(t1 > t0)) {
    throw Error(ErrorCode::kInvalidParameter, "integration span must be positive");
  }
  if (!(opt.tol.rel >= 1e-12)) {
    throw Error(ErrorCode::kInvalidParameter, "relative tolerance must be >= 1e-12");
  }
  const double span = t1 - t0;

  std::vector<double> knots{t0};
  for (double b : opt.breakpoints) {
    if (b > t0 && b < t1) knots.push_back(b);
  }
  knots.push_back(t1);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  Vec<N> atol{};
  for (std::size_t i = 0; i < N; ++i) {
    atol[i] = opt.tol.abs * (opt.scale[i] > 0.0 ? opt.scale[i] : 1.0);
  }
  auto err_norm = [&](const Vec<N>& e, const Vec<N>& ya, const Vec<N>& yb) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = atol[i] + opt.tol.rel * std::max(std::abs(ya[i]), std::abs(yb[i]));
      s += (e[i] / sk) * (e[i] / sk);
    }
    return std::sqrt(s / static_cast<double>(N));
  };

  DenseSolution<N> sol;
  sol.start(t0, y0);
  Vec<N> y = y0;
  double t = t0;
  double h = 0.0;
  double facold = 1e-4;
  std::size_t nsteps = 0;

  for (std::size_t iv = 0; iv + 1 < knots.size(); ++iv) {
    const Interval interval{iv, knots[iv], knots[iv + 1]};
    const double hi = interval.hi;
    auto f = [&](double tt, const Vec<N>& yy) { return rhs(tt, yy, interval); };
    Vec<N> k1 = f(t, y);

    if (h <= 0.0) {
      // Initial step guess in the spirit of Hairer's HINIT.
      double d0 = 0.0, d1 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sk = atol[i] + opt.tol.rel * std::abs(y[i]);
        d0 += (y[i] / sk) * (y[i] / sk);
        d1 += (k1[i] / sk) * (k1[i] / sk);
      }
      d0 = std::sqrt(d0 / N);
      d1 = std::sqrt(d1 / N);
      double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
      h0 = std::min(h0, hi - t);
      const Vec<N> y1 = detail::axpy<N>(y, h0, {{1.0, &k1}});
      const Vec<N> f1 = f(t + h0, y1);
      double d2 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sk = atol[i] + opt.tol.rel * std::abs(y[i]);
        d2 += ((f1[i] - k1[i]) / sk) * ((f1[i] - k1[i]) / sk);
      }
      d2 = std::sqrt(d2 / N) / h0;
      const double dm = std::max(d1, d2);
      const double h1 = dm <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
      h = std::min(100.0 * h0, h1);
    }

    bool reject = false;
    while (t < hi) {
      if (++nsteps > opt.max_steps) {
        throw Error(ErrorCode::kStepSizeUnderflow, "step budget exhausted");
      }
      bool last = false;
      if (t + 1.01 * h >= hi) {
        h = hi - t;
        last = true;
      }
      if (h < 1e-12 * span) {
        throw Error(ErrorCode::kStepSizeUnderflow,
                    "step size " + std::to_string(h) + " at t = " + std::to_string(t));
      }
      const Vec<N> k2 = f(t + C::c2 * h, detail::axpy<N>(y, h, {{C::a21, &k1}}));
      const Vec<N> k3 = f(t + C::c3 * h, detail::axpy<N>(y, h, {{C::a31, &k1}, {C::a32, &k2}}));
      const Vec<N> k4 = f(t + C::c4 * h,
                          detail::axpy<N>(y, h, {{C::a41, &k1}, {C::a42, &k2}, {C::a43, &k3}}));
      const Vec<N> k5 =
          f(t + C::c5 * h, detail::axpy<N>(y, h, {{C::a51, &k1}, {C::a52, &k2}, {C::a53, &k3},
                                                  {C::a54, &k4}}));
      const Vec<N> k6 =
          f(t + h, detail::axpy<N>(y, h, {{C::a61, &k1}, {C::a62, &k2}, {C::a63, &k3},
                                          {C::a64, &k4}, {C::a65, &k5}}));
      const Vec<N> ynew = detail::axpy<N>(
          y, h, {{C::a71, &k1}, {C::a73, &k3}, {C::a74, &k4}, {C::a75, &k5}, {C::a76, &k6}});
      const double tnew = last ? hi : t + h;
      const Vec<N> k7 = f(tnew, ynew);

      Vec<N> e{};
      for (std::size_t i = 0; i < N; ++i) {
        e[i] = h * (C::e1 * k1[i] + C::e3 * k3[i] + C::e4 * k4[i] + C::e5 * k5[i] +
                    C::e6 * k6[i] + C::e7 * k7[i]);
      }
      const double err = err_norm(e, y, ynew);

      // PI controller (Hairer-Wanner, beta = 0.04).
      constexpr double beta = 0.04, safe = 0.9, facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
      const double fac11 = std::pow(std::max(err, 1e-300), 0.2 - beta * 0.75);
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double hnew = h / fac;

      if (err <= 1.0) {
        facold = std::max(err, 1e-4);
        std::array<Vec<N>, 4> rc{};
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = ynew[i] - y[i];
          const double bspl = h * k1[i] - dy;
          rc[0][i] = dy;
          rc[1][i] = bspl;
          rc[2][i] = dy - h * k7[i] - bspl;
          rc[3][i] = h * (C::d1 * k1[i] + C::d3 * k3[i] + C::d4 * k4[i] + C::d5 * k5[i] +
                          C::d6 * k6[i] + C::d7 * k7[i]);
        }
        sol.push(tnew, ynew, rc);
        if (opt.on_step) opt.on_step(tnew, ynew);
        y = ynew;
        t = tnew;
        k1 = k7;
        if (reject) hnew = std::min(hnew, h);
        reject = false;
        if (last) {
          // Keep the pre-truncation size for the next interval.
          h = std::max(h, hnew);
          break;
        }
        h = hnew;
      } else {
        hnew = h / std::min(facc1, fac11 / safe);
        reject = true;
        h = hnew;
      }
    }
  }
  return sol;
}

enum class Crossing { kRising, kFalling, kAny };

template <std::size_t N>
struct Event {
  double t;
  Vec<N> state;
  double g;
};

/// First sign change of g along the solution within [t_from, t_to], bracketed
/// on the step mesh and refined by bisection on the dense output down to a
/// bracket width of `width_tol` (default 1e-10 of the solution span).
template <std::size_t N, class G>
std::optional<Event<N>> locate_crossing(const DenseSolution<N>& sol, G&& g, Crossing dir,
                                        std::optional<double> t_from = std::nullopt,
                                        std::optional<double> t_to = std::nullopt,
                                        std::optional<double> width_tol = std::nullopt) {
  const double a = t_from.value_or(sol.t_begin());
  const double b = t_to.value_or(sol.t_end());
  const double width = width_tol.value_or(1e-10 * (sol.t_end() - sol.t_begin()));
  const auto mesh = sol.mesh();

  auto crosses = [dir](double prev, double cur) {
    const bool rising = prev < 0.0 && cur >= 0.0;
    const bool falling = prev > 0.0 && cur <= 0.0;
    switch (dir) {
      case Crossing::kRising: return rising;
      case Crossing::kFalling: return falling;
      case Crossing::kAny: return rising || falling;
    }
    return false;
  };

  std::vector<double> pts{a};
  for (double tm : mesh) {
    if (tm > a && tm < b) pts.push_back(tm);
  }
  pts.push_back(b);

  double prev_t = pts[0];
  double prev_g = g(sol.sample(prev_t));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double cur_t = pts[i];
    const double cur_g = g(sol.sample(cur_t));
    if (crosses(prev_g, cur_g)) {
      double lo = prev_t, hi = cur_t;
      double g_lo = prev_g;
      for (int it = 0; it < 200 && hi - lo > width; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(sol.sample(mid));
        if (crosses(g_lo, gm)) {
          hi = mid;
        } else {
          lo = mid;
          g_lo = gm;
        }
      }
      const Vec<N> s_lo = sol.sample(lo);
      const Vec<N> s_hi = sol.sample(hi);
      const double glo = g(s_lo), ghi = g(s_hi);
      if (std::abs(glo) < std::abs(ghi)) return Event<N>{lo, s_lo, glo};
      return Event<N>{hi, s_hi, ghi};
    }
    prev_t = cur_t;
    prev_g = cur_g;
  }
  return std::nullopt;
}

}  // namespace sitopt

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace nvmpr::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_max = 0.0;  // 0: unbounded
  double h_min = 0.0;
  long max_steps = 10'000'000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

// Dormand-Prince 5(4) with the embedded 4th-order solution for error control.
namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// fifth-order minus fourth-order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

template <std::size_t N>
struct StepResult {
  State<N> y;
  State<N> error;
};

// One Dormand-Prince step of size h (may be negative) from (t, y).
template <std::size_t N, class F>
StepResult<N> dormand_prince_step(const F& f, double t, const State<N>& y, double h, Stats* stats = nullptr) {
  using namespace dp;
  State<N> k1, k2, k3, k4, k5, k6, k7, tmp;
  f(t, y, k1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  f(t + c2 * h, tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  f(t + c3 * h, tmp, k3);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  f(t + c4 * h, tmp, k4);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f(t + c5 * h, tmp, k5);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  f(t + h, tmp, k6);

  StepResult<N> r;
  for (std::size_t i = 0; i < N; ++i)
    r.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  f(t + h, r.y, k7);
  for (std::size_t i = 0; i < N; ++i)
    r.error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  if (stats) stats->evaluations += 7;
  return r;
}

// Adaptive integration from t0 to t1 (t1 > t0). `h` carries the step size
// between calls so consecutive short intervals do not restart from scratch.
// Returns false when max_steps is exhausted or the step underflows.
template <std::size_t N, class F>
bool integrate(const F& f, double t0, double t1, State<N>& y, double& h, const StepControl& ctl,
               Stats* stats = nullptr) {
  double t = t0;
  if (!(h > 0.0)) h = (t1 - t0) / 16.0;
  long steps = 0;
  while (t < t1) {
    if (++steps > ctl.max_steps) return false;
    double step = std::min(h, t1 - t);
    if (ctl.h_max > 0.0) step = std::min(step, ctl.h_max);
    const bool last = step >= t1 - t;

    const StepResult<N> r = dormand_prince_step<N>(f, t, y, step, stats);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double scale = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(r.y[i]));
      err = std::max(err, std::abs(r.error[i]) / scale);
    }
    if (!std::isfinite(err)) err = 1e10;

    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      t = last ? t1 : t + step;
      y = r.y;
      if (stats) ++stats->accepted;
      // a step clipped by the interval end says little about the next one
      h = step < h ? std::max(h, step * factor) : step * factor;
      if (ctl.h_max > 0.0) h = std::min(h, ctl.h_max);
    } else {
      if (stats) ++stats->rejected;
      h = step * factor;
      if (h <= ctl.h_min || h < 1e-14 * std::max(1.0, std::abs(t))) return false;
    }
  }
  return true;
}

}  // namespace nvmpr::ode

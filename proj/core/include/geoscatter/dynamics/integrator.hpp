#pragma once

// Embedded Dormand-Prince 5(4) integrator with PI step control and
// terminal events located by bracketing on single re-steps from the last
// accepted state.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "geoscatter/errors.hpp"

namespace geoscatter {

struct FlowOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double h_init = 1e-2;
  double h_max = 0.25;
  double h_min = 1e-14;
  std::size_t max_steps = 4'000'000;
};

template <std::size_t N>
using FlowState = std::array<double, N>;

/// Terminates the flow when `value` crosses from <= 0 to > 0.
/// `starts_on_surface` marks events whose value vanishes at the initial
/// state (a ray launched from the boundary); the first bracket then uses
/// value(y(s))/s, which tends to `rate` as s -> 0.
template <std::size_t N>
struct FlowEvent {
  std::function<double(const FlowState<N>&)> value;
  std::function<double(const FlowState<N>& y, const FlowState<N>& dydt)> rate;
  bool starts_on_surface = false;
};

template <std::size_t N>
struct FlowHooks {
  std::vector<FlowEvent<N>> events;
  /// Applied to every accepted state (invariant projection).
  std::function<void(FlowState<N>&)> project;
  /// Stops the flow after an accepted step, without refinement.
  std::function<bool(double, const FlowState<N>&)> stop;
  /// Optional state-dependent cap on the step size.
  std::function<double(const FlowState<N>&)> step_limit;
  std::function<void(double, const FlowState<N>&)> observe;
};

enum class FlowStop { event, time_limit, predicate };

template <std::size_t N>
struct FlowOutcome {
  FlowState<N> y{};
  double t = 0.0;
  FlowStop reason = FlowStop::time_limit;
  int event_index = -1;
  std::size_t steps = 0;
};

namespace detail {

struct DopriTableau {
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
};

} // namespace detail

/// One Dormand-Prince step of size h from y with k1 = f(y). Writes the
/// fifth-order solution, f at the new point (FSAL) and the local error
/// vector.
template <std::size_t N, class Rhs>
void dopri_step(const Rhs& f, const FlowState<N>& y, const FlowState<N>& k1, double h,
                FlowState<N>& y_out, FlowState<N>& k7, FlowState<N>* err = nullptr) {
  using T = detail::DopriTableau;
  FlowState<N> k2, k3, k4, k5, k6, tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * T::a21 * k1[i];
  f(tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
  f(tmp, k3);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
  f(tmp, k4);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
  f(tmp, k5);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                         T::a65 * k5[i]);
  f(tmp, k6);
  for (std::size_t i = 0; i < N; ++i)
    y_out[i] = y[i] + h * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] + T::a75 * k5[i] +
                           T::a76 * k6[i]);
  f(y_out, k7);
  if (err) {
    for (std::size_t i = 0; i < N; ++i)
      (*err)[i] = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                       T::e6 * k6[i] + T::e7 * k7[i]);
  }
}

/// Integrates y' = f(y) from t = 0 until an event fires, the stop predicate
/// holds or t reaches t_max.
template <std::size_t N, class Rhs>
FlowOutcome<N> integrate_flow(const Rhs& f, FlowState<N> y, double t_max, const FlowOptions& opt,
                              const FlowHooks<N>& hooks) {
  constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 5.0, kBeta = 0.04;
  constexpr double kAlpha = 0.2 - 0.75 * kBeta;

  FlowOutcome<N> out;
  if (hooks.project) hooks.project(y);
  FlowState<N> k1, y1, k7, err;
  f(y, k1);
  if (hooks.observe) hooks.observe(0.0, y);

  double t = 0.0;
  double h = std::min(opt.h_init, opt.h_max);
  double err_prev = 1e-4;
  bool first_step = true;

  std::vector<double> level(hooks.events.size());
  for (std::size_t e = 0; e < hooks.events.size(); ++e) level[e] = hooks.events[e].value(y);

  while (t < t_max) {
    if (out.steps++ > opt.max_steps) throw StiffnessError(t);
    double h_try = std::min({h, opt.h_max, t_max - t});
    if (hooks.step_limit) h_try = std::min(h_try, hooks.step_limit(y));
    bool hit_end = (t + h_try >= t_max);

    double err_norm = 0.0;
    for (;;) {
      dopri_step<N>(f, y, k1, h_try, y1, k7, &err);
      double acc = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        const double r = err[i] / sc;
        acc += r * r;
      }
      err_norm = std::sqrt(acc / static_cast<double>(N));
      if (!std::isfinite(err_norm)) err_norm = 1e10;
      if (err_norm <= 1.0) break;
      const double fac = std::max(kFacMin, kSafety * std::pow(err_norm, -kAlpha));
      h_try *= fac;
      hit_end = false;
      if (h_try < opt.h_min * (1.0 + t)) throw StiffnessError(t);
    }

    // Event detection on the accepted step.
    double best_s = std::numeric_limits<double>::infinity();
    int best_e = -1;
    for (std::size_t e = 0; e < hooks.events.size(); ++e) {
      const FlowEvent<N>& ev = hooks.events[e];
      const double v1 = ev.value(y1);
      const bool on_surface = first_step && ev.starts_on_surface;
      if (!(v1 > 0.0) || (!on_surface && level[e] > 0.0)) continue;
      FlowState<N> ys, ks;
      auto g = [&](double s) {
        if (s <= 0.0) return on_surface ? ev.rate(y, k1) : level[e];
        dopri_step<N>(f, y, k1, s, ys, ks);
        const double v = ev.value(ys);
        return on_surface ? v / s : v;
      };
      const double ga = g(0.0);
      if (ga > 0.0) {
        // Already outside at the start: the step begins on the far side.
        if (0.0 < best_s) {
          best_s = 0.0;
          best_e = static_cast<int>(e);
        }
        continue;
      }
      const double gb = on_surface ? v1 / h_try : v1;
      std::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(
          g, 0.0, h_try, ga, gb, boost::math::tools::eps_tolerance<double>(52), iters);
      const double s = root.second;
      if (s < best_s) {
        best_s = s;
        best_e = static_cast<int>(e);
      }
    }
    if (best_e >= 0) {
      FlowState<N> ks;
      if (best_s > 0.0) {
        dopri_step<N>(f, y, k1, best_s, out.y, ks);
      } else {
        out.y = y;
      }
      out.t = t + best_s;
      out.reason = FlowStop::event;
      out.event_index = best_e;
      if (hooks.observe) hooks.observe(out.t, out.y);
      return out;
    }

    t = hit_end ? t_max : t + h_try;
    y = y1;
    if (hooks.project) {
      hooks.project(y);
      f(y, k1);
    } else {
      k1 = k7;
    }
    for (std::size_t e = 0; e < hooks.events.size(); ++e) level[e] = hooks.events[e].value(y);
    first_step = false;
    if (hooks.observe) hooks.observe(t, y);
    if (hooks.stop && hooks.stop(t, y)) {
      out.y = y;
      out.t = t;
      out.reason = FlowStop::predicate;
      return out;
    }

    const double e = std::max(err_norm, 1e-10);
    double fac = kSafety * std::pow(e, -kAlpha) * std::pow(err_prev, kBeta);
    fac = std::clamp(fac, kFacMin, kFacMax);
    err_prev = e;
    h = h_try * fac;
  }
  out.y = y;
  out.t = t;
  out.reason = FlowStop::time_limit;
  return out;
}

} // namespace geoscatter

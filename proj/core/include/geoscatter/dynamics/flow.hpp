#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <variant>

#include "geoscatter/dynamics/integrator.hpp"
#include "geoscatter/geometry/metric.hpp"

namespace geoscatter {

/// A point z = (x, v) of the unit tangent bundle SM.
struct UnitTangentVector {
  Vec2 x = Vec2::Zero();
  Vec2 v = Vec2::Zero();
};

/// Rescales v to unit g-length at x.
UnitTangentVector make_unit(const MetricSpec& metric, const Vec2& x, const Vec2& v);

/// The unit vector at x making `angle` with the first vector of the
/// g-orthonormal frame.
UnitTangentVector unit_from_angle(const MetricSpec& metric, const Vec2& x, double angle);

double speed(const MetricSpec& metric, const UnitTangentVector& z);

/// -z = (x, -v)
inline UnitTangentVector reversed(const UnitTangentVector& z) { return {z.x, -z.v}; }

/// Clairaut constant f(r)^2 dtheta/dt of revolution scenes.
double clairaut_constant(const MetricSpec& metric, const UnitTangentVector& z);

/// Clairaut constants within rounding of +-1 are taken as exactly +-1, the
/// value of rays asymptotic to the closed geodesic.
inline double snapped_clairaut(double c) {
  constexpr double kUlps = 8.0 * std::numeric_limits<double>::epsilon();
  return std::abs(std::abs(c) - 1.0) <= kUlps ? std::copysign(1.0, c) : c;
}

namespace flow {

template <std::size_t N>
inline UnitTangentVector tangent_of(const FlowState<N>& y) {
  return {Vec2(y[0], y[1]), Vec2(y[2], y[3])};
}

template <std::size_t N>
inline FlowState<N> initial_state(const UnitTangentVector& z) {
  FlowState<N> y{};
  y[0] = z.x[0];
  y[1] = z.x[1];
  y[2] = z.v[0];
  y[3] = z.v[1];
  return y;
}

/// Geodesic vector field X_g on the first four components. `extra` fills
/// the derivatives of the appended channels:
///   extra(const GeometryJet&, const FlowState<N>& y, FlowState<N>& dy)
template <std::size_t N, class Extra>
auto geodesic_field(const MetricSpec& metric, Extra extra) {
  return [&metric, extra](const FlowState<N>& y, FlowState<N>& dy) {
    const Vec2 x(y[0], y[1]);
    const Vec2 v(y[2], y[3]);
    const GeometryJet jet = geometry_unchecked(metric, x);
    const Vec2 a = geodesic_acceleration(jet, v);
    dy[0] = v[0];
    dy[1] = v[1];
    dy[2] = a[0];
    dy[3] = a[1];
    extra(jet, y, dy);
  };
}

struct NoExtra {
  template <std::size_t N>
  void operator()(const GeometryJet&, const FlowState<N>&, FlowState<N>&) const {}
};

enum class Projection { speed, clairaut };

/// Keeps the flow on the unit sphere bundle. With Projection::clairaut on
/// revolution scenes it also holds the Clairaut constant at its initial
/// value and rebuilds v_r from the energy wherever that is well
/// conditioned (f^2 - c^2 > 1e-6, or c exactly +-1).
template <std::size_t N>
std::function<void(FlowState<N>&)> invariant_projection(const MetricSpec& metric,
                                                       const UnitTangentVector& z0,
                                                       Projection mode = Projection::clairaut) {
  if (metric.is_revolution() && mode == Projection::clairaut) {
    const bool cosh_profile = std::get<RevolutionStrip>(metric.base).profile == Profile::cosh;
    const double c = snapped_clairaut(clairaut_constant(metric, z0));
    const bool exact = std::abs(c) == 1.0;
    return [cosh_profile, c, exact](FlowState<N>& y) {
      const double f = cosh_profile ? std::cosh(y[0]) : 1.0;
      const double sh = cosh_profile ? std::sinh(y[0]) : 0.0;
      // f^2 - c^2 without cancellation near the closed geodesic r = 0
      const double gap = sh * sh + (1.0 - c) * (1.0 + c);
      if (exact || gap > 1e-6) y[2] = gap > 0.0 ? std::copysign(std::sqrt(gap) / f, y[2]) : 0.0;
      y[3] = c / (f * f);
    };
  }
  return [&metric](FlowState<N>& y) {
    const GeometryJet jet = geometry_unchecked(metric, Vec2(y[0], y[1]));
    const Vec2 v(y[2], y[3]);
    const double s = metric_norm(jet.g, v);
    y[2] /= s;
    y[3] /= s;
  };
}

/// Terminal event on leaving M (or M_e).
template <std::size_t N>
FlowEvent<N> boundary_event(const MetricSpec& metric, Region region, bool starts_on_surface) {
  FlowEvent<N> ev;
  ev.value = [&metric, region](const FlowState<N>& y) {
    return boundary_level(metric, Vec2(y[0], y[1]), region);
  };
  ev.rate = [&metric](const FlowState<N>& y, const FlowState<N>& dy) {
    return boundary_level_gradient(metric, Vec2(y[0], y[1])).dot(Vec2(dy[0], dy[1]));
  };
  ev.starts_on_surface = starts_on_surface;
  return ev;
}

} // namespace flow
} // namespace geoscatter

#pragma once

// Line integrals carried as extra channels of the geodesic flow.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "geoscatter/dynamics/flow.hpp"
#include "geoscatter/errors.hpp"

namespace geoscatter::detail {

template <std::size_t C>
struct RayIntegral {
  std::array<double, C> values{};
  double t = 0.0;
  FlowState<4 + C> y{};
  FlowStop reason = FlowStop::time_limit;
};

template <std::size_t C>
struct RayControl {
  std::function<double(const FlowState<4 + C>&)> step_limit;
  std::function<bool(double, const FlowState<4 + C>&)> stop;
};

/// Integrates integrand(jet, x, v, out) over the geodesic through z until
/// it leaves `region`, `control.stop` fires or t_max is reached.
template <std::size_t C, class Integrand>
RayIntegral<C> integrate_ray(const MetricSpec& metric, const UnitTangentVector& z, Region region,
                             const Integrand& integrand, double t_max, const FlowOptions& options,
                             const RayControl<C>& control = {}) {
  constexpr std::size_t N = 4 + C;
  const double e = region == Region::interior ? metric.boundary_extent() : metric.extension_extent();
  const double tol = 1e-9 * std::max(1.0, e * e);
  const double level = boundary_level(metric, z.x, region);
  if (!(level <= tol)) throw DomainError("ray starts outside its region");
  const bool on_surface = std::abs(level) <= tol;
  if (on_surface && !(boundary_level_gradient(metric, z.x).dot(z.v) < 0.0)) {
    throw DomainError("boundary vector is not inward pointing");
  }

  auto extra = [&integrand](const GeometryJet& jet, const FlowState<N>& y, FlowState<N>& dy) {
    std::array<double, C> out{};
    integrand(jet, Vec2(y[0], y[1]), Vec2(y[2], y[3]), out);
    for (std::size_t c = 0; c < C; ++c) dy[4 + c] = out[c];
  };
  const auto field = flow::geodesic_field<N>(metric, extra);
  FlowHooks<N> hooks;
  hooks.events.push_back(flow::boundary_event<N>(metric, region, on_surface));
  hooks.project = flow::invariant_projection<N>(metric, z);
  hooks.step_limit = control.step_limit;
  hooks.stop = control.stop;
  const FlowOutcome<N> out = integrate_flow<N>(field, flow::initial_state<N>(z), t_max, options, hooks);

  RayIntegral<C> r;
  for (std::size_t c = 0; c < C; ++c) r.values[c] = out.y[4 + c];
  r.t = out.t;
  r.y = out.y;
  r.reason = out.reason;
  return r;
}

} // namespace geoscatter::detail

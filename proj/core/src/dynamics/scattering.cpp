#include "geoscatter/dynamics/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoscatter/errors.hpp"

namespace geoscatter {

namespace {

constexpr std::size_t kN = 4;

double boundary_tolerance(const MetricSpec& metric) {
  const double e = metric.boundary_extent();
  return 1e-9 * std::max(1.0, e * e);
}

} // namespace

ScatterRecord trace_to_boundary(const MetricSpec& metric, const UnitTangentVector& z, double t_max,
                                const FlowOptions& options) {
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  const double level = boundary_level(metric, z.x);
  const double tol = boundary_tolerance(metric);
  if (!z.x.allFinite() || !z.v.allFinite() || level > tol) {
    std::ostringstream os;
    os << "base point (" << z.x[0] << ", " << z.x[1] << ") lies outside M";
    throw DomainError(os.str());
  }
  const bool on_boundary = std::abs(level) <= tol;
  if (on_boundary && !(boundary_level_gradient(metric, z.x).dot(z.v) < 0.0)) {
    throw DomainError("boundary vector is not inward pointing");
  }

  ScatterRecord rec;
  rec.entry = z;
  if (metric.is_revolution()) rec.clairaut = clairaut_constant(metric, z);

  const auto field = flow::geodesic_field<kN>(metric, flow::NoExtra{});
  FlowHooks<kN> hooks;
  hooks.events.push_back(flow::boundary_event<kN>(metric, Region::interior, on_boundary));
  const auto project = flow::invariant_projection<kN>(metric, z);
  const double c0 = rec.clairaut.value_or(0.0);
  hooks.project = [&](FlowState<kN>& y) {
    const UnitTangentVector u = flow::tangent_of(y);
    rec.speed_drift = std::max(rec.speed_drift, std::abs(speed(metric, u) - 1.0));
    if (rec.clairaut) {
      rec.clairaut_drift = std::max(rec.clairaut_drift, std::abs(clairaut_constant(metric, u) - c0));
    }
    project(y);
  };

  const FlowOutcome<kN> out =
      integrate_flow<kN>(field, flow::initial_state<kN>(z), t_max, options, hooks);
  if (out.reason == FlowStop::event) {
    const UnitTangentVector ex = flow::tangent_of(out.y);
    rec.speed_drift = std::max(rec.speed_drift, std::abs(speed(metric, ex) - 1.0));
    rec.exit = ex;
    rec.tau = out.t;
    rec.trapped = false;
  } else {
    rec.trapped = true;
  }
  return rec;
}

UnitTangentVector boundary_entry(const BoundaryChart& chart, double s, double alpha) {
  const BoundaryPoint p = chart.at(s);
  return {p.x, entry_direction(p, alpha)};
}

ScatterCoords to_coords(const BoundaryChart& chart, const ScatterRecord& record) {
  ScatterCoords c;
  c.s_in = chart.locate(record.entry.x);
  const BoundaryPoint pin = chart.at(c.s_in);
  c.angle_in = entry_angle(chart.metric(), pin, record.entry.v);
  c.tau = record.tau;
  c.trapped = record.trapped;
  if (record.clairaut) c.clairaut = *record.clairaut;
  if (record.exit) {
    c.s_out = chart.locate(record.exit->x);
    const BoundaryPoint pout = chart.at(c.s_out);
    c.angle_out = exit_angle(chart.metric(), pout, record.exit->v);
  }
  return c;
}

ScatterCoords scatter_from_boundary(const BoundaryChart& chart, double s, double alpha,
                                    double t_max, const FlowOptions& options) {
  if (!(std::abs(alpha) < 0.5 * kPi)) throw DomainError("entry angle must satisfy |alpha| < pi/2");
  const ScatterRecord rec = trace_to_boundary(chart.metric(), boundary_entry(chart, s, alpha), t_max, options);
  ScatterCoords c = to_coords(chart, rec);
  c.s_in = chart.wrap(s);
  c.angle_in = alpha;
  return c;
}

} // namespace geoscatter

#include "geoscatter/dynamics/flow.hpp"

namespace geoscatter {

UnitTangentVector make_unit(const MetricSpec& metric, const Vec2& x, const Vec2& v) {
  const GeometryJet jet = evaluate_geometry(metric, x);
  return {x, v / metric_norm(jet.g, v)};
}

UnitTangentVector unit_from_angle(const MetricSpec& metric, const Vec2& x, double angle) {
  const GeometryJet jet = evaluate_geometry(metric, x);
  return {x, orthonormal_frame(jet.g).direction(angle)};
}

double speed(const MetricSpec& metric, const UnitTangentVector& z) {
  return metric_norm(geometry_unchecked(metric, z.x).g, z.v);
}

double clairaut_constant(const MetricSpec& metric, const UnitTangentVector& z) {
  if (!metric.is_revolution()) return 0.0;
  const GeometryJet jet = geometry_unchecked(metric, z.x);
  return jet.g(1, 1) * z.v[1];
}

} // namespace geoscatter

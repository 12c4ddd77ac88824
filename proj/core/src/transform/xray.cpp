#include "geoscatter/transform/xray.hpp"

#include <sstream>

#include "ray_integral.hpp"

namespace geoscatter {

namespace {

XrayValue line_integral(const MetricSpec& metric, const SphereFunction& u,
                        const UnitTangentVector& start, double sign, double t_max,
                        const FlowOptions& options) {
  auto integrand = [&u, sign](const GeometryJet&, const Vec2& x, const Vec2& v,
                              std::array<double, 1>& out) { out[0] = u(x, sign * v); };
  const auto r = detail::integrate_ray<1>(metric, start, Region::interior, integrand, t_max, options);
  if (r.reason != FlowStop::event) {
    std::ostringstream os;
    os << "geodesic from (" << start.x[0] << ", " << start.x[1] << ") trapped up to t=" << r.t;
    throw TrappedError(os.str(), r.values[0]);
  }
  XrayValue xv;
  xv.value = r.values[0];
  xv.tau = r.t;
  if (sign > 0.0) {
    xv.entry = start;
  } else {
    xv.entry = {Vec2(r.y[0], r.y[1]), -Vec2(r.y[2], r.y[3])};
  }
  return xv;
}

} // namespace

XrayValue xray(const MetricSpec& metric, const SphereFunction& u, const UnitTangentVector& z_out,
               double t_max, const FlowOptions& options) {
  return line_integral(metric, u, reversed(z_out), -1.0, t_max, options);
}

XrayValue xray_from_entry(const MetricSpec& metric, const SphereFunction& u,
                          const UnitTangentVector& z_in, double t_max, const FlowOptions& options) {
  return line_integral(metric, u, z_in, 1.0, t_max, options);
}

XrayValue xray(const MetricSpec& metric, const SymTensorField2& f, const UnitTangentVector& z_out,
               double t_max) {
  return xray(metric, pi2_star(f), z_out, t_max);
}

XrayValue xray(const MetricSpec& metric, const ScalarField& f, const UnitTangentVector& z_out,
               double t_max) {
  return xray(metric, pi0_star(f), z_out, t_max);
}

double xray_adjoint(const MetricSpec& metric,
                    const std::function<double(const UnitTangentVector&)>& u,
                    const UnitTangentVector& z, double t_max) {
  const ScatterRecord rec = trace_to_boundary(metric, z, t_max);
  if (rec.trapped) throw TrappedError("forward-trapped vector has no exit", 0.0);
  return u(*rec.exit);
}

SymTensorField2 symmetrized_derivative(const MetricSpec& metric, const OneForm& w) {
  SymTensorField2 out;
  out.f = [metric, w](const Vec2& x) {
    const GeometryJet jet = geometry_unchecked(metric, x);
    const Vec2 wx = w.w(x);
    const Mat2 dw = w.jacobian(x);
    return Mat2(0.5 * (dw + dw.transpose()) - wx[0] * jet.christoffel[0] - wx[1] * jet.christoffel[1]);
  };
  return out;
}

} // namespace geoscatter

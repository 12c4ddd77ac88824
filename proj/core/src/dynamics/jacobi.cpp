#include "geoscatter/dynamics/jacobi.hpp"

#include <algorithm>
#include <cmath>

#include "geoscatter/errors.hpp"

namespace geoscatter {

namespace {

constexpr std::size_t kJ = 8;

struct TwoJacobi {
  void operator()(const GeometryJet& jet, const FlowState<kJ>& y, FlowState<kJ>& dy) const {
    dy[4] = y[5];
    dy[5] = -jet.curvature * y[4];
    dy[6] = y[7];
    dy[7] = -jet.curvature * y[6];
  }
};

constexpr std::size_t kG = 4;

/// (r, v_r) of a state on the section through theta0.
Vec2 section_coords(const FlowState<kG>& y) { return {y[0], y[2]}; }

struct ReturnResult {
  FlowState<kG> y;
  double period;
};

FlowState<kG> section_state(const Vec2& p, double theta0, double direction,
                            const MetricSpec& metric) {
  const double f2 = geometry_unchecked(metric, Vec2(p[0], theta0)).g(1, 1);
  const double rest = 1.0 - p[1] * p[1];
  if (!(rest > 0.0)) throw ConvergenceError("closed orbit search reached a meridian direction");
  return {p[0], theta0, p[1], direction * std::sqrt(rest / f2)};
}

ReturnResult return_map(const MetricSpec& metric, const FlowState<kG>& y0, double dtheta) {
  const double target = y0[1] + dtheta;
  const double direction = dtheta > 0.0 ? 1.0 : -1.0;
  const auto field = flow::geodesic_field<kG>(metric, flow::NoExtra{});
  FlowHooks<kG> hooks;
  FlowEvent<kG> section;
  section.value = [target, direction](const FlowState<kG>& y) {
    return direction * (y[1] - target);
  };
  hooks.events.push_back(section);
  hooks.events.push_back(flow::boundary_event<kG>(metric, Region::extension, false));
  hooks.project = flow::invariant_projection<kG>(metric, flow::tangent_of(y0), flow::Projection::speed);
  FlowOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  const double t_limit = 20.0 * kTwoPi * std::cosh(metric.extension_extent());
  const FlowOutcome<kG> out = integrate_flow<kG>(field, y0, t_limit, opt, hooks);
  if (out.reason != FlowStop::event || out.event_index != 0) {
    throw ConvergenceError("geodesic does not return to the section inside the extension");
  }
  return {out.y, out.t};
}

double curvature_at(const MetricSpec& metric, const FlowState<kG>& y) {
  return geometry_unchecked(metric, Vec2(y[0], y[1])).curvature;
}

/// exp of a traceless 2x2 matrix.
Mat2 traceless_exp(const Mat2& a) {
  const double mu2 = -a.determinant();
  double c, sc;
  if (mu2 > 1e-8) {
    const double mu = std::sqrt(mu2);
    c = std::cosh(mu);
    sc = std::sinh(mu) / mu;
  } else if (mu2 < -1e-8) {
    const double mu = std::sqrt(-mu2);
    c = std::cos(mu);
    sc = std::sin(mu) / mu;
  } else {
    c = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0;
    sc = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
  }
  return c * Mat2::Identity() + sc * a;
}

} // namespace

JacobiPath jacobi_transport(const MetricSpec& metric, const UnitTangentVector& z, double T,
                            double j0, double jdot0, Region confine, const FlowOptions& options) {
  if (!(T > 0.0)) throw ConfigError("Jacobi transport time must be positive");
  const double level = boundary_level(metric, z.x, confine);
  const double e = confine == Region::interior ? metric.boundary_extent() : metric.extension_extent();
  const double tol = 1e-9 * std::max(1.0, e * e);
  if (level > tol) throw DomainError("Jacobi transport starts outside its region");
  const bool on_surface = std::abs(level) <= tol;

  FlowState<kJ> y{};
  y[0] = z.x[0];
  y[1] = z.x[1];
  y[2] = z.v[0];
  y[3] = z.v[1];
  y[4] = j0;
  y[5] = jdot0;
  y[6] = -jdot0;
  y[7] = j0;

  JacobiPath path;
  const auto field = flow::geodesic_field<kJ>(metric, TwoJacobi{});
  FlowHooks<kJ> hooks;
  hooks.events.push_back(flow::boundary_event<kJ>(metric, confine, on_surface));
  hooks.project = flow::invariant_projection<kJ>(metric, z);
  hooks.observe = [&path](double t, const FlowState<kJ>& s) {
    path.frames.push_back({t, s[4], s[5]});
    path.wronskian.push_back(s[4] * s[7] - s[5] * s[6]);
  };
  const FlowOutcome<kJ> out = integrate_flow<kJ>(field, y, T, options, hooks);
  path.end_time = out.t;
  path.left_region = out.reason == FlowStop::event;

  for (std::size_t k = 1; k < path.frames.size(); ++k) {
    const JacobiFrame& a = path.frames[k - 1];
    const JacobiFrame& b = path.frames[k];
    if (b.j == 0.0) {
      path.zeros.push_back(b.t);
    } else if (a.t > 0.0 && a.j != 0.0 && (a.j < 0.0) != (b.j < 0.0)) {
      path.zeros.push_back(a.t + (b.t - a.t) * a.j / (a.j - b.j));
    }
  }
  return path;
}

MonodromyReport closed_geodesic_monodromy(const MetricSpec& metric, const UnitTangentVector& guess,
                                          std::size_t magnus_steps) {
  if (!metric.is_revolution()) {
    throw ConfigError("closed geodesic monodromy needs a revolution scene");
  }
  if (magnus_steps < 16) throw ConfigError("monodromy needs at least 16 Magnus steps");
  const UnitTangentVector g0 = make_unit(metric, guess.x, guess.v);
  if (g0.v[1] == 0.0) throw ConvergenceError("guess is a meridian direction");
  const double direction = g0.v[1] > 0.0 ? 1.0 : -1.0;
  const double theta0 = g0.x[1];

  // multiple shooting across kSections meridians keeps each leg's
  // amplification near exp(2 pi / kSections)
  constexpr int kSections = 8;
  constexpr double kClosure = 1e-10;
  constexpr double kFd = 1e-7;
  const double dtheta = direction * kTwoPi / kSections;
  MonodromyReport rep;
  Eigen::VectorXd p(2 * kSections);
  for (int k = 0; k < kSections; ++k) {
    p[2 * k] = g0.x[0];
    p[2 * k + 1] = g0.v[0];
  }
  auto leg = [&](int k, const Vec2& q) {
    return return_map(metric, section_state(q, theta0 + k * dtheta, direction, metric), dtheta);
  };
  auto residual = [&](const Eigen::VectorXd& x, double* period) {
    Eigen::VectorXd r(2 * kSections);
    double total = 0.0;
    for (int k = 0; k < kSections; ++k) {
      const ReturnResult rr = leg(k, x.segment<2>(2 * k));
      const int kn = (k + 1) % kSections;
      r.segment<2>(2 * k) = section_coords(rr.y) - x.segment<2>(2 * kn);
      total += rr.period;
    }
    if (period) *period = total;
    return r;
  };
  double period = 0.0;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd res = residual(p, &period);
    rep.closure_residual = res.norm();
    rep.newton_iterations = it;
    if (rep.closure_residual < kClosure) break;
    if (it >= 30) throw ConvergenceError("no closed orbit near the guess (Newton stalled)");
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * kSections, 2 * kSections);
    for (int k = 0; k < kSections; ++k) {
      const Vec2 base = section_coords(leg(k, p.segment<2>(2 * k)).y);
      for (int c = 0; c < 2; ++c) {
        Vec2 q = p.segment<2>(2 * k);
        q[c] += kFd;
        jac.block<2, 1>(2 * k, 2 * k + c) = (section_coords(leg(k, q).y) - base) / kFd;
      }
      const int kn = (k + 1) % kSections;
      jac.block<2, 2>(2 * k, 2 * kn) -= Mat2::Identity();
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.rank() < 2 * kSections) throw ConvergenceError("return map is degenerate near the guess");
    p -= lu.solve(res);
  }
  const FlowState<kG> start = section_state(p.segment<2>(0), theta0, direction, metric);
  rep.orbit = flow::tangent_of(start);
  rep.period = period;

  // fourth-order Magnus integrator on Y' = [[0, 1], [-K, 0]] Y
  const double h = rep.period / static_cast<double>(magnus_steps);
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const auto field = flow::geodesic_field<kG>(metric, flow::NoExtra{});
  FlowHooks<kG> hooks;
  hooks.project = flow::invariant_projection<kG>(metric, rep.orbit, flow::Projection::speed);
  FlowOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  auto advance = [&](FlowState<kG>& y, double dt) {
    if (dt > 0.0) y = integrate_flow<kG>(field, y, dt, opt, hooks).y;
  };
  Mat2 m = Mat2::Identity();
  FlowState<kG> y = start;
  for (std::size_t k = 0; k < magnus_steps; ++k) {
    FlowState<kG> ya = y;
    advance(ya, c1 * h);
    FlowState<kG> yb = ya;
    advance(yb, (c2 - c1) * h);
    Mat2 a1, a2;
    a1 << 0.0, 1.0, -curvature_at(metric, ya), 0.0;
    a2 << 0.0, 1.0, -curvature_at(metric, yb), 0.0;
    const Mat2 omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
    m = traceless_exp(omega) * m;
    advance(yb, (1.0 - c2) * h);
    y = yb;
  }
  rep.monodromy = m;
  rep.det = m.determinant();
  const double tr = m.trace();
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * rep.det));
  rep.eigenvalues[0] = 0.5 * (tr + disc);
  rep.eigenvalues[1] = 0.5 * (tr - disc);
  rep.reciprocity_defect = std::abs(rep.eigenvalues[0] * rep.eigenvalues[1] - 1.0);
  rep.hyperbolic = std::abs(tr) > 2.0 + 1e-9;
  return rep;
}

} // namespace geoscatter

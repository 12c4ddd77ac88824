#include "geoscatter/transform/normal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "geoscatter/support/parallel.hpp"
#include "ray_integral.hpp"

namespace geoscatter {

namespace {

constexpr double kBumpRate = 16.0;

/// exp(-a q) minus its quadratic Taylor polynomial at q = 1: positive on
/// [0, 1), vanishing to second order at q = 1.
double bump_profile(double q) {
  if (q >= 1.0) return 0.0;
  const double u = q - 1.0;
  const double tail = std::exp(-kBumpRate) * (1.0 - kBumpRate * u + 0.5 * kBumpRate * kBumpRate * u * u);
  return std::exp(-kBumpRate * q) - tail;
}

double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

FlowOptions kernel_flow_options() {
  FlowOptions o;
  o.rtol = 1e-6;
  o.atol = 1e-8;
  o.h_max = 1.0;
  return o;
}

/// Closest approach of the geodesic from x in direction `angle` to a chart
/// point, with the Jacobi field J(0) = 0, J'(0) = 1 along the way.
struct Approach {
  bool reached = false;
  double miss = 0.0;
  double t = 0.0;
  double j = 0.0;
};

constexpr std::size_t kA = 6;

Approach closest_approach(const MetricSpec& metric, const Vec2& x, const OrthonormalFrame& frame,
                          double angle, const Vec2& target, Region region, double t_max) {
  FlowState<kA> y{};
  const Vec2 v = frame.direction(angle);
  y[0] = x[0];
  y[1] = x[1];
  y[2] = v[0];
  y[3] = v[1];
  y[4] = 0.0;
  y[5] = 1.0;
  auto jacobi = [](const GeometryJet& jet, const FlowState<kA>& s, FlowState<kA>& ds) {
    ds[4] = s[5];
    ds[5] = -jet.curvature * s[4];
  };
  const auto field = flow::geodesic_field<kA>(metric, jacobi);
  FlowHooks<kA> hooks;
  FlowEvent<kA> approach;
  approach.value = [&metric, target](const FlowState<kA>& s) {
    return chart_difference(metric, Vec2(s[0], s[1]), target).dot(Vec2(s[2], s[3]));
  };
  hooks.events.push_back(approach);
  hooks.events.push_back(flow::boundary_event<kA>(metric, region, false));
  hooks.project = flow::invariant_projection<kA>(metric, {x, v});
  const FlowOutcome<kA> out = integrate_flow<kA>(field, y, t_max, kernel_flow_options(), hooks);
  const Vec2 p(out.y[0], out.y[1]);
  const Vec2 vel(out.y[2], out.y[3]);
  Approach a;
  // without a closest approach the sign still tells on which side of the
  // final tangent line the target lies
  a.miss = cross(vel, chart_difference(metric, target, p)) / vel.norm();
  if (out.reason != FlowStop::event || out.event_index != 0) return a;
  a.reached = true;
  a.t = out.t;
  a.j = out.y[4];
  return a;
}

struct Connection {
  double angle = 0.0;
  Approach approach;
};

Connection connecting_geodesic(const MetricSpec& metric, const Vec2& x, const OrthonormalFrame& frame,
                               const Mat2& gx, const Vec2& target, Region region, double t_max,
                               const std::optional<Vec2>& hint) {
  const double tol = 1e-10 * (1.0 + chart_difference(metric, target, x).norm());
  auto eval = [&](double a) { return closest_approach(metric, x, frame, a, target, region, t_max); };
  const double guess = frame.angle_of(gx, hint ? *hint : chart_difference(metric, target, x));

  // secant from the guess
  double a0 = guess;
  Approach m0 = eval(a0);
  double a1 = a0 + (hint ? 1e-5 : 1e-3);
  Approach m1 = eval(a1);
  for (int it = 0; it < 12 && m0.reached && m1.reached; ++it) {
    if (std::abs(m1.miss) <= tol || std::abs(a1 - a0) < 1e-13) return {a1, m1};
    const double denom = m1.miss - m0.miss;
    if (denom == 0.0) break;
    const double a2 = std::clamp(a1 - m1.miss * (a1 - a0) / denom, a1 - 0.25 * kPi, a1 + 0.25 * kPi);
    a0 = a1;
    m0 = m1;
    a1 = a2;
    m1 = eval(a1);
  }

  // scan for sign changes of the miss and refine the one closest to the
  // guess by the Illinois method; sign changes between rays that never
  // approach the target are the direction pointing away from it
  constexpr int kScan = 48;
  std::vector<double> angles(kScan + 1);
  std::vector<Approach> scan(kScan + 1);
  for (int k = 0; k <= kScan; ++k) {
    angles[k] = guess - kPi + kTwoPi * k / kScan;
    scan[k] = k == kScan ? scan[0] : eval(angles[k]);
  }
  std::vector<int> order;
  for (int k = 0; k < kScan; ++k) {
    if ((scan[k].miss < 0.0) != (scan[k + 1].miss < 0.0) && (scan[k].reached || scan[k + 1].reached)) {
      order.push_back(k);
    }
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(angles[a] + kPi / kScan - guess) < std::abs(angles[b] + kPi / kScan - guess);
  });
  for (int k : order) {
    double lo = angles[k], hi = angles[k + 1];
    Approach mlo = scan[k], mhi = scan[k + 1];
    int side = 0;
    for (int it = 0; it < 100; ++it) {
      double flo = mlo.miss, fhi = mhi.miss;
      if (side == -1) flo *= 0.5;
      if (side == 1) fhi *= 0.5;
      const double a = (flo * hi - fhi * lo) / (flo - fhi);
      const Approach m = eval(a);
      if (m.reached && (std::abs(m.miss) <= tol || hi - lo < 1e-15)) return {a, m};
      if ((m.miss < 0.0) == (mlo.miss < 0.0)) {
        lo = a;
        mlo = m;
        side = 1;
      } else {
        hi = a;
        mhi = m;
        side = -1;
      }
      if (hi - lo < 1e-15) break;
    }
  }
  std::ostringstream os;
  os << "no geodesic found from (" << x[0] << ", " << x[1] << ") to (" << target[0] << ", "
     << target[1] << ")";
  throw ConvergenceError(os.str());
}

double euclidean_speed(const FlowState<6>& y) { return std::hypot(y[2], y[3]); }

} // namespace

Mollifier::Mollifier(const MetricSpec& metric, const Vec2& center, double radius)
    : periodic_(metric.is_revolution()), center_(center), radius_(radius) {
  if (!(radius > 0.0)) throw ConfigError("mollifier radius must be positive");
  // metric mass by polar Gauss-Legendre quadrature in chart coordinates
  using Gauss = boost::math::quadrature::gauss<double, 60>;
  constexpr int kAngles = 48;
  double mass = 0.0;
  for (int k = 0; k < kAngles; ++k) {
    const double phi = kTwoPi * (k + 0.5) / kAngles;
    const Vec2 dir(std::cos(phi), std::sin(phi));
    mass += Gauss::integrate(
        [&](double rho) {
          const Vec2 y = center + rho * dir;
          return bump_profile(rho * rho / (radius * radius)) * geometry_unchecked(metric, y).sqrt_det *
                 rho;
        },
        0.0, radius);
  }
  mass *= kTwoPi / kAngles;
  scale_ = 1.0 / mass;
}

double Mollifier::chart_distance(const Vec2& y) const {
  Vec2 d = y - center_;
  if (periodic_) d[1] = std::remainder(d[1], kTwoPi);
  return d.norm();
}

double Mollifier::operator()(const Vec2& y) const {
  const double r = chart_distance(y);
  return scale_ * bump_profile(r * r / (radius_ * radius_));
}

NormalOperatorValue normal_operator_apply(const MetricSpec& metric, const ScalarField& f,
                                          const Vec2& x, std::size_t angular_nodes, Region region,
                                          double t_max) {
  if (angular_nodes < 16) throw ConfigError("normal operator needs at least 16 angular nodes");
  const GeometryJet jet = evaluate_geometry(metric, x);
  if (boundary_level(metric, x, region) >= 0.0) {
    throw DomainError("normal operator base point must lie in the interior");
  }
  const OrthonormalFrame frame = orthonormal_frame(jet.g);
  auto integrand = [&f](const GeometryJet&, const Vec2& p, const Vec2&, std::array<double, 1>& o) {
    o[0] = f(p);
  };
  detail::RayControl<1> control;
  if (f.compact()) {
    // never step across the support of f
    const Vec2 c = f.support_center;
    const double rs = f.support_radius;
    control.step_limit = [c, rs](const FlowState<5>& y) {
      const double sp = std::hypot(y[2], y[3]);
      const double gap = (Vec2(y[0], y[1]) - c).norm() - rs;
      return std::max(0.1 * rs, gap) / sp;
    };
  }
  std::vector<double> line(angular_nodes);
  std::size_t trapped = 0;
  for (std::size_t k = 0; k < angular_nodes; ++k) {
    const double angle = kTwoPi * static_cast<double>(k) / static_cast<double>(angular_nodes);
    const UnitTangentVector z{x, frame.direction(angle)};
    const auto r = detail::integrate_ray<1>(metric, z, region, integrand, t_max, FlowOptions{}, control);
    line[k] = r.values[0];
    if (r.reason != FlowStop::event) ++trapped;
  }
  NormalOperatorValue out;
  out.value = 2.0 * kTwoPi / static_cast<double>(angular_nodes) * pairwise_sum(line);
  out.trapped_directions = trapped;
  return out;
}

KernelEstimate normal_operator_kernel(const MetricSpec& metric, const Vec2& x, const Vec2& x_prime,
                                      double bandwidth, const KernelOptions& options) {
  const double sep = chart_difference(metric, x_prime, x).norm();
  if (!(bandwidth > 0.0) || !(bandwidth < 0.25 * sep)) {
    std::ostringstream os;
    os << "bandwidth " << bandwidth << " must be positive and below a quarter of the separation "
       << sep;
    throw ResolutionError(os.str());
  }
  if (options.window_nodes < 8) throw ConfigError("kernel window needs at least 8 nodes");
  const GeometryJet jx = evaluate_geometry(metric, x);
  const GeometryJet jxp = evaluate_geometry(metric, x_prime);
  if (boundary_level(metric, x, options.region) > 0.0 ||
      boundary_level(metric, x_prime, options.region) > 0.0) {
    throw DomainError("kernel points must lie in the chosen region");
  }
  const OrthonormalFrame frame = orthonormal_frame(jx.g);
  const Connection conn =
      connecting_geodesic(metric, x, frame, jx.g, x_prime, options.region, options.t_max,
                          options.initial_direction);

  const Mollifier coarse(metric, x_prime, bandwidth);
  const Mollifier fine(metric, x_prime, 0.5 * bandwidth);
  const double metric_radius =
      bandwidth * std::sqrt(Eigen::SelfAdjointEigenSolver<Mat2>(jxp.g).eigenvalues().maxCoeff());

  // angular window whose edge rays miss the coarse support
  double half = 1.1 * metric_radius / std::max(std::abs(conn.approach.j), 1e-300);
  for (int grow = 0;; ++grow) {
    bool clear = true;
    for (double side : {-1.0, 1.0}) {
      const Approach a = closest_approach(metric, x, frame, conn.angle + side * half, x_prime,
                                          options.region, options.t_max);
      if (a.reached && std::abs(a.miss) <= 1.05 * bandwidth) clear = false;
    }
    if (clear) break;
    if (grow == 6) throw ResolutionError("angular window does not isolate the mollifier support");
    half *= 1.5;
  }

  auto integrand = [&coarse, &fine](const GeometryJet&, const Vec2& p, const Vec2&,
                                    std::array<double, 2>& o) {
    const double r = coarse.chart_distance(p);
    if (r >= coarse.radius()) {
      o[0] = o[1] = 0.0;
      return;
    }
    o[0] = coarse(p);
    o[1] = fine(p);
  };
  detail::RayControl<2> control;
  const double h = bandwidth;
  control.step_limit = [&coarse, h](const FlowState<6>& y) {
    const double gap = coarse.chart_distance(Vec2(y[0], y[1])) - 1.2 * h;
    return std::max(0.5 * h, gap) / euclidean_speed(y);
  };
  control.stop = [&metric, &coarse, h, x_prime](double, const FlowState<6>& y) {
    const Vec2 p(y[0], y[1]);
    if (coarse.chart_distance(p) <= 1.2 * h) return false;
    return chart_difference(metric, p, x_prime).dot(Vec2(y[2], y[3])) > 0.0;
  };

  const std::size_t m = options.window_nodes;
  const double step = 2.0 * half / static_cast<double>(m - 1);
  std::vector<double> vc(m, 0.0), vf(m, 0.0);
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double angle = conn.angle - half + step * static_cast<double>(k);
    const UnitTangentVector z{x, frame.direction(angle)};
    const auto r = detail::integrate_ray<2>(metric, z, options.region, integrand, options.t_max,
                                            kernel_flow_options(), control);
    vc[k] = r.values[0];
    vf[k] = r.values[1];
  }

  KernelEstimate est;
  est.x = x;
  est.x_prime = x_prime;
  est.bandwidth = bandwidth;
  est.value_coarse = 2.0 * step * pairwise_sum(vc);
  est.value_fine = 2.0 * step * pairwise_sum(vf);
  est.value = (4.0 * est.value_fine - est.value_coarse) / 3.0;
  est.err = std::abs(est.value_fine - est.value_coarse);
  est.distance = conn.approach.t;
  est.jacobi = std::abs(conn.approach.j);
  est.direction = frame.direction(conn.angle);
  return est;
}

KernelDerivative normal_operator_kernel_derivative(const MetricSpec& metric, const Vec2& x,
                                                   const Vec2& x_prime, const Vec2& v, double delta,
                                                   double bandwidth, const KernelOptions& options) {
  const KernelEstimate plus = normal_operator_kernel(metric, x + delta * v, x_prime, bandwidth, options);
  const KernelEstimate minus = normal_operator_kernel(metric, x - delta * v, x_prime, bandwidth, options);
  KernelDerivative d;
  d.value = (plus.value - minus.value) / (2.0 * delta);
  d.err = (plus.err + minus.err) / (2.0 * delta);
  return d;
}

} // namespace geoscatter

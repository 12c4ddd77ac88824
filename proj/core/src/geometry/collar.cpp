#include "geoscatter/geometry/collar.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "geoscatter/dynamics/flow.hpp"
#include "geoscatter/errors.hpp"

namespace geoscatter {

namespace {

constexpr std::size_t kN = 6;
constexpr double kFdStep = 1e-3;

FlowOptions collar_flow_options() {
  FlowOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  o.h_max = 0.05;
  return o;
}

struct JacobiChannel {
  void operator()(const GeometryJet& jet, const FlowState<kN>& y, FlowState<kN>& dy) const {
    dy[4] = y[5];
    dy[5] = -jet.curvature * y[4];
  }
};

} // namespace

CollarChart::CollarChart(BoundaryChart chart, double eps) : chart_(std::move(chart)), eps_(eps) {}

std::vector<CollarSample> CollarChart::shoot(double s, const std::vector<double>& depths) const {
  const MetricSpec& metric = chart_.metric();
  const BoundaryPoint p = chart_.at(s);
  std::vector<CollarSample> out;
  out.reserve(depths.size());
  if (depths.empty()) return out;
  const double sign = depths.back() < 0.0 ? -1.0 : 1.0;

  FlowState<kN> y{};
  y[0] = p.x[0];
  y[1] = p.x[1];
  y[2] = sign * p.normal[0];
  y[3] = sign * p.normal[1];
  y[4] = 1.0;
  y[5] = -sign * p.second_ff;

  const auto field = flow::geodesic_field<kN>(metric, JacobiChannel{});
  FlowHooks<kN> hooks;
  hooks.project = flow::invariant_projection<kN>(metric, flow::tangent_of(y));
  // the Jacobi field reaching zero marks a focal point of the boundary
  FlowEvent<kN> focal;
  focal.value = [](const FlowState<kN>& st) { return -st[4]; };
  hooks.events.push_back(focal);
  hooks.events.push_back(flow::boundary_event<kN>(metric, Region::extension, false));

  const FlowOptions opt = collar_flow_options();
  double t = 0.0;
  for (double d : depths) {
    const double target = std::abs(d);
    if (target < t) throw ConfigError("collar depths must be sorted by magnitude");
    if (target > t) {
      const FlowOutcome<kN> o = integrate_flow<kN>(field, y, target - t, opt, hooks);
      if (o.reason == FlowStop::event && o.event_index == 0) throw FocalRadiusError(sign * (t + o.t), s);
      if (o.reason == FlowStop::event) {
        throw DomainError("collar depth " + std::to_string(d) + " leaves the extension domain");
      }
      y = o.y;
      t = target;
    }
    CollarSample cs;
    cs.x = Vec2(y[0], y[1]);
    if (!in_extension(metric, cs.x)) {
      throw DomainError("collar depth " + std::to_string(d) + " leaves the extension domain");
    }
    cs.velocity = sign * Vec2(y[2], y[3]);
    cs.j = y[4];
    cs.jdot = sign * y[5];
    out.push_back(cs);
  }
  return out;
}

Vec2 CollarChart::psi(double r, double s) const { return shoot(s, {r}).front().x; }

CollarChart normal_collar(const MetricSpec& metric, double eps, std::size_t n_r, std::size_t n_s) {
  return normal_collar(boundary_chart(metric, std::max<std::size_t>(n_s, 64)), eps, n_r, n_s);
}

CollarChart normal_collar(const BoundaryChart& chart, double eps, std::size_t n_r, std::size_t n_s) {
  if (!(eps > 0.0)) throw ConfigError("collar width must be positive");
  if (n_r < 2 || n_s < 3) throw ConfigError("collar grid needs n_r >= 2 and n_s >= 3");
  CollarChart collar(chart, eps);
  const MetricSpec& metric = chart.metric();

  collar.r_nodes.resize(n_r);
  for (std::size_t i = 0; i < n_r; ++i) {
    collar.r_nodes[i] = eps * static_cast<double>(i) / static_cast<double>(n_r - 1);
  }
  collar.s_nodes.resize(n_s);
  for (std::size_t k = 0; k < n_s; ++k) {
    collar.s_nodes[k] = chart.length() * static_cast<double>(k) / static_cast<double>(n_s);
  }
  collar.h.resize(static_cast<Eigen::Index>(n_r), static_cast<Eigen::Index>(n_s));
  collar.h_fd.resizeLike(collar.h);

  std::vector<std::vector<CollarSample>> columns(n_s);
  for (std::size_t k = 0; k < n_s; ++k) {
    const double s = collar.s_nodes[k];
    columns[k] = collar.shoot(s, collar.r_nodes);
    // fourth-order central difference in s
    std::vector<std::vector<CollarSample>> nb;
    for (int m : {-2, -1, 1, 2}) {
      nb.push_back(collar.shoot(chart.advance(s, m * kFdStep), collar.r_nodes));
    }
    for (std::size_t i = 0; i < n_r; ++i) {
      const CollarSample& c = columns[k][i];
      auto off = [&](std::size_t m) { return chart_difference(metric, nb[m][i].x, c.x); };
      const Vec2 ds = (-off(3) + 8.0 * off(2) - 8.0 * off(1) + off(0)) / (12.0 * kFdStep);
      const Mat2 g = geometry_unchecked(metric, c.x).g;
      const double grr = metric_dot(g, c.velocity, c.velocity);
      const double grs = metric_dot(g, c.velocity, ds);
      collar.max_grr_error = std::max(collar.max_grr_error, std::abs(grr - 1.0));
      collar.max_grs_error = std::max(collar.max_grs_error, std::abs(grs));
      collar.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = c.j * c.j;
      collar.h_fd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = metric_dot(g, ds, ds);
    }
  }

  // adjacent normal geodesics must stay apart
  const double floor = 1e-3 * eps;
  for (std::size_t k = 0; k < n_s; ++k) {
    const std::size_t kn = (k + 1) % n_s;
    if (chart.components() > 1 && chart.component_of(collar.s_nodes[k]) !=
                                      chart.component_of(collar.s_nodes[kn])) {
      continue;
    }
    for (std::size_t i = 0; i < n_r; ++i) {
      const Vec2& a = columns[k][i].x;
      const Vec2& b = columns[kn][i].x;
      const Vec2 d = chart_difference(metric, b, a);
      const double dist = metric_norm(geometry_unchecked(metric, a).g, d);
      if (dist < floor) throw FocalRadiusError(collar.r_nodes[i], collar.s_nodes[k]);
    }
  }
  return collar;
}

} // namespace geoscatter

#include "geoscatter/geometry/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "geoscatter/errors.hpp"

namespace geoscatter {

namespace {

constexpr std::size_t kPanels = 256;
using Gauss = boost::math::quadrature::gauss<double, 10>;

double wrap_periodic(double s, double period) {
  double w = std::fmod(s, period);
  if (w < 0.0) w += period;
  if (w >= period) w -= period;
  return w;
}

double profile_value(const MetricSpec& m, double r) {
  const auto& strip = std::get<RevolutionStrip>(m.base);
  return strip.profile == Profile::cosh ? std::cosh(r) : 1.0;
}

Vec2 inward_normal(const MetricSpec& m, const GeometryJet& jet) {
  const Vec2 grad = boundary_level_gradient(m, jet.point);
  const Vec2 up = jet.g_inv * grad;
  return -up / metric_norm(jet.g, up);
}

} // namespace

BoundaryChart::BoundaryChart(const MetricSpec& metric, std::size_t n_samples) : metric_(metric) {
  validate(metric_);
  radius_ = metric_.boundary_extent();
  if (metric_.is_revolution()) {
    const double len = kTwoPi * profile_value(metric_, radius_);
    component_start_ = {0.0, len};
    component_length_ = {len, len};
    total_length_ = 2.0 * len;
  } else {
    cumulative_.assign(kPanels + 1, 0.0);
    const double dth = kTwoPi / static_cast<double>(kPanels);
    for (std::size_t k = 0; k < kPanels; ++k) {
      const double a = dth * static_cast<double>(k);
      cumulative_[k + 1] =
          cumulative_[k] + Gauss::integrate([this](double t) { return speed(t); }, a, a + dth);
    }
    total_length_ = cumulative_.back();
    component_start_ = {0.0};
    component_length_ = {total_length_};
  }
  const std::size_t n = std::max<std::size_t>(n_samples, 4);
  sample_s_.resize(n);
  sample_ii_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sample_s_[i] = total_length_ * static_cast<double>(i) / static_cast<double>(n);
    sample_ii_[i] = at(sample_s_[i]).second_ff;
  }
}

double BoundaryChart::speed(double theta) const {
  const Vec2 x(radius_ * std::cos(theta), radius_ * std::sin(theta));
  const Vec2 dx(-x[1], x[0]);
  return metric_norm(geometry_unchecked(metric_, x).g, dx);
}

double BoundaryChart::arclength_at(double theta) const {
  const double dth = kTwoPi / static_cast<double>(kPanels);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(theta / dth), kPanels - 1);
  const double a = dth * static_cast<double>(k);
  if (theta == a) return cumulative_[k];
  return cumulative_[k] + Gauss::integrate([this](double t) { return speed(t); }, a, theta);
}

double BoundaryChart::theta_at(double s) const {
  // panel by bisection on the cumulative table, then Newton inside it
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto k = std::clamp<std::ptrdiff_t>(it - cumulative_.begin() - 1, 0,
                                            static_cast<std::ptrdiff_t>(kPanels) - 1);
  const auto ku = static_cast<std::size_t>(k);
  const double dth = kTwoPi / static_cast<double>(kPanels);
  const double lo = dth * static_cast<double>(ku);
  const double frac = (s - cumulative_[ku]) / (cumulative_[ku + 1] - cumulative_[ku]);
  double theta = lo + frac * dth;
  for (int iter = 0; iter < 30; ++iter) {
    const double step = (arclength_at(theta) - s) / speed(theta);
    theta = std::clamp(theta - step, lo, lo + dth);
    if (std::abs(step) < 1e-15) break;
  }
  return theta;
}

BoundaryPoint BoundaryChart::planar_point(double theta, double s) const {
  BoundaryPoint p;
  p.s = s;
  p.component = 0;
  p.x = Vec2(radius_ * std::cos(theta), radius_ * std::sin(theta));
  const GeometryJet jet = geometry_unchecked(metric_, p.x);
  const Vec2 d1(-p.x[1], p.x[0]);
  const Vec2 d2 = -p.x;
  const double sp = metric_norm(jet.g, d1);
  p.tangent = d1 / sp;
  p.normal = inward_normal(metric_, jet);
  const Vec2 cov = d2 - geodesic_acceleration(jet, d1);
  p.second_ff = metric_dot(jet.g, cov, p.normal) / (sp * sp);
  return p;
}

BoundaryPoint BoundaryChart::at(double s) const {
  const double sw = wrap(s);
  if (!metric_.is_revolution()) return planar_point(theta_at(sw), sw);

  BoundaryPoint p;
  p.s = sw;
  p.component = component_of(sw);
  const double f = profile_value(metric_, radius_);
  const double r = p.component == 0 ? -radius_ : radius_;
  const double theta = (sw - component_start_[static_cast<std::size_t>(p.component)]) / f;
  p.x = Vec2(r, theta);
  const GeometryJet jet = geometry_unchecked(metric_, p.x);
  p.tangent = Vec2(0.0, 1.0 / f);
  p.normal = inward_normal(metric_, jet);
  const Vec2 cov = -geodesic_acceleration(jet, Vec2(0.0, 1.0));
  p.second_ff = metric_dot(jet.g, cov, p.normal) / (f * f);
  return p;
}

double BoundaryChart::locate(const Vec2& x) const {
  if (metric_.is_revolution()) {
    const int c = x[0] < 0.0 ? 0 : 1;
    const double f = profile_value(metric_, radius_);
    return component_start_[static_cast<std::size_t>(c)] + wrap_periodic(x[1], kTwoPi) * f;
  }
  const double theta = wrap_periodic(std::atan2(x[1], x[0]), kTwoPi);
  return wrap(arclength_at(theta));
}

double BoundaryChart::wrap(double s) const { return wrap_periodic(s, total_length_); }

double BoundaryChart::advance(double s, double ds) const {
  const double sw = wrap(s);
  const auto c = static_cast<std::size_t>(component_of(sw));
  return component_start_[c] + wrap_periodic(sw - component_start_[c] + ds, component_length_[c]);
}

int BoundaryChart::component_of(double s) const {
  if (component_start_.size() == 1) return 0;
  return s >= component_start_[1] ? 1 : 0;
}

double BoundaryChart::arc_difference(double a, double b) const {
  const double wa = wrap(a), wb = wrap(b);
  const int ca = component_of(wa), cb = component_of(wb);
  if (ca != cb) throw DomainError("boundary points lie on different boundary components");
  const double len = component_length_[static_cast<std::size_t>(ca)];
  double d = std::fmod(wb - wa, len);
  if (d > 0.5 * len) d -= len;
  if (d <= -0.5 * len) d += len;
  return d;
}

double BoundaryChart::min_second_ff() const {
  return *std::min_element(sample_ii_.begin(), sample_ii_.end());
}

BoundaryChart boundary_chart(const MetricSpec& metric, std::size_t n_samples, bool require_convex) {
  BoundaryChart chart(metric, n_samples);
  if (require_convex) {
    const auto& ii = chart.sample_second_ff();
    for (std::size_t i = 0; i < ii.size(); ++i) {
      if (!(ii[i] > 0.0)) throw ConvexityError(chart.sample_s()[i], ii[i]);
    }
  }
  return chart;
}

Vec2 entry_direction(const BoundaryPoint& p, double alpha) {
  return std::cos(alpha) * p.normal + std::sin(alpha) * p.tangent;
}

Vec2 exit_direction(const BoundaryPoint& p, double beta) {
  return -std::cos(beta) * p.normal + std::sin(beta) * p.tangent;
}

double entry_angle(const MetricSpec& metric, const BoundaryPoint& p, const Vec2& v) {
  const Mat2 g = geometry_unchecked(metric, p.x).g;
  return std::atan2(metric_dot(g, v, p.tangent), metric_dot(g, v, p.normal));
}

double exit_angle(const MetricSpec& metric, const BoundaryPoint& p, const Vec2& v) {
  const Mat2 g = geometry_unchecked(metric, p.x).g;
  return std::atan2(metric_dot(g, v, p.tangent), -metric_dot(g, v, p.normal));
}

} // namespace geoscatter

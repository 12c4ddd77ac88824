#pragma once

#include <cstddef>
#include <optional>

#include "geoscatter/dynamics/scattering.hpp"
#include "geoscatter/transform/fields.hpp"

namespace geoscatter {

struct NormalOperatorValue {
  double value = 0.0;
  /// Directions whose ray reached t_max; they contribute their truncated
  /// integral.
  std::size_t trapped_directions = 0;
};

/// Pi_0 f(x) = int_{S_x M} int_{-tau(x,-v)}^{tau(x,v)} f(gamma_{x,v}(t)) dt dv,
/// i.e. twice the integral of f over the forward half-rays from x. Uses the
/// trapezoid rule on `angular_nodes` equally spaced directions of a
/// g-orthonormal frame. Rays are confined to `region`. Throws ConfigError
/// for fewer than 16 directions.
NormalOperatorValue normal_operator_apply(const MetricSpec& metric, const ScalarField& f,
                                          const Vec2& x, std::size_t angular_nodes,
                                          Region region = Region::interior,
                                          double t_max = kDefaultTMax);

/// C2 radial bump exp(-16 q) - T(q), q = |y - c|^2 / radius^2, in chart
/// coordinates, where T is the quadratic Taylor polynomial of exp(-16 q) at
/// q = 1. Scaled to unit mass for the metric area element.
class Mollifier {
 public:
  Mollifier(const MetricSpec& metric, const Vec2& center, double radius);
  double operator()(const Vec2& y) const;
  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }
  /// Chart distance |y - center| (angular coordinate wrapped).
  double chart_distance(const Vec2& y) const;

 private:
  bool periodic_ = false;
  Vec2 center_;
  double radius_;
  double scale_ = 1.0;
};

struct KernelOptions {
  /// Trapezoid nodes across the angular window around the connecting
  /// geodesic.
  std::size_t window_nodes = 32;
  Region region = Region::interior;
  double t_max = kDefaultTMax;
  /// Starting chart direction for the search of the geodesic from x to x'
  /// (default: the chart direction x' - x).
  std::optional<Vec2> initial_direction;
};

struct KernelEstimate {
  Vec2 x = Vec2::Zero();
  Vec2 x_prime = Vec2::Zero();
  /// Richardson extrapolation (4 v_fine - v_coarse) / 3.
  double value = 0.0;
  /// Chart radius of the coarse mollifier; the fine one has half of it.
  double bandwidth = 0.0;
  /// |v_fine - v_coarse|
  double err = 0.0;
  double value_coarse = 0.0;
  double value_fine = 0.0;
  /// Length of the connecting geodesic.
  double distance = 0.0;
  /// |J(distance)| of the Jacobi field with J(0) = 0, J'(0) = 1 along it.
  double jacobi = 0.0;
  /// Unit initial velocity of the connecting geodesic at x.
  Vec2 direction = Vec2::Zero();
};

/// Pointwise estimate of the Schwartz kernel Pi_0(x, x') from Pi_0 applied
/// to mollifiers of chart radius `bandwidth` and `bandwidth / 2` at x'.
/// Only directions in a window around the geodesic from x to x' are
/// integrated; on revolution scenes geodesics winding around the cylinder
/// are not included. Throws ResolutionError unless
/// bandwidth < |x - x'| / 4 (chart distance).
KernelEstimate normal_operator_kernel(const MetricSpec& metric, const Vec2& x, const Vec2& x_prime,
                                      double bandwidth, const KernelOptions& options = {});

struct KernelDerivative {
  /// (K(x + delta v, x') - K(x - delta v, x')) / (2 delta)
  double value = 0.0;
  /// Propagated Richardson error of the two estimates.
  double err = 0.0;
};

KernelDerivative normal_operator_kernel_derivative(const MetricSpec& metric, const Vec2& x,
                                                   const Vec2& x_prime, const Vec2& v, double delta,
                                                   double bandwidth,
                                                   const KernelOptions& options = {});

} // namespace geoscatter

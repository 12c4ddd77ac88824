#pragma once

#include <cstddef>
#include <vector>

#include "geoscatter/geometry/metric.hpp"

namespace geoscatter {

/// The boundary at one arclength value, with the frame used for entry and
/// exit angles.
struct BoundaryPoint {
  double s = 0.0;
  int component = 0;
  Vec2 x = Vec2::Zero();
  /// Unit tangent in the direction of increasing s.
  Vec2 tangent = Vec2::Zero();
  /// Inward unit normal.
  Vec2 normal = Vec2::Zero();
  double second_ff = 0.0;
};

/// Arclength parameterization of the boundary of M. Planar scenes have one
/// component (the circle, counterclockwise); revolution scenes have two, the
/// circle r = -a on [0, L0) followed by r = +a on [L0, 2 L0).
class BoundaryChart {
 public:
  BoundaryChart(const MetricSpec& metric, std::size_t n_samples);

  const MetricSpec& metric() const { return metric_; }
  double length() const { return total_length_; }
  int components() const { return static_cast<int>(component_start_.size()); }
  double component_start(int c) const { return component_start_[static_cast<std::size_t>(c)]; }
  double component_length(int c) const { return component_length_[static_cast<std::size_t>(c)]; }

  /// s is reduced modulo length().
  BoundaryPoint at(double s) const;
  /// Arclength of a boundary point (x need only be close to the boundary).
  double locate(const Vec2& x) const;
  /// Reduces s to [0, length()).
  double wrap(double s) const;
  /// Moves s by ds along its own component, periodically.
  double advance(double s, double ds) const;
  /// Signed arclength from a to b along the shared component, the shorter
  /// way round. Throws DomainError when a and b lie on different components.
  double arc_difference(double a, double b) const;
  int component_of(double s) const;

  /// Uniform samples of II used for the convexity check.
  const std::vector<double>& sample_s() const { return sample_s_; }
  const std::vector<double>& sample_second_ff() const { return sample_ii_; }
  double min_second_ff() const;

 private:
  double speed(double theta) const;
  double arclength_at(double theta) const;
  double theta_at(double s) const;
  BoundaryPoint planar_point(double theta, double s) const;

  MetricSpec metric_;
  double radius_ = 1.0;
  std::vector<double> component_start_;
  std::vector<double> component_length_;
  double total_length_ = 0.0;
  // planar arclength table at panel edges theta_k = 2 pi k / panels
  std::vector<double> cumulative_;
  std::vector<double> sample_s_;
  std::vector<double> sample_ii_;
};

/// Builds the chart and checks strict convexity on `n_samples` uniform
/// samples. Throws ConvexityError at the first sample with II <= 0 unless
/// `require_convex` is false.
BoundaryChart boundary_chart(const MetricSpec& metric, std::size_t n_samples,
                             bool require_convex = true);

/// Boundary vector entering M at angle alpha from the inward normal,
/// positive towards increasing s.
Vec2 entry_direction(const BoundaryPoint& p, double alpha);
/// Boundary vector leaving M at angle beta from the outward normal,
/// positive towards increasing s.
Vec2 exit_direction(const BoundaryPoint& p, double beta);
/// Inverses of the two maps above for a unit vector v at p.
double entry_angle(const MetricSpec& metric, const BoundaryPoint& p, const Vec2& v);
double exit_angle(const MetricSpec& metric, const BoundaryPoint& p, const Vec2& v);

} // namespace geoscatter

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "geoscatter/geometry/boundary.hpp"

namespace geoscatter {

/// The endpoint of the unit-speed normal geodesic from the boundary point at
/// arclength s, together with the scalar normal Jacobi field that measures
/// the boundary metric h(r, s) = j^2.
struct CollarSample {
  Vec2 x = Vec2::Zero();
  /// d/dr psi(r, s)
  Vec2 velocity = Vec2::Zero();
  double j = 1.0;
  double jdot = 0.0;
};

/// Normal-form coordinates psi(r, s) near the boundary: r is the distance
/// to the boundary along inward normal geodesics.
class CollarChart {
 public:
  CollarChart(BoundaryChart chart, double eps);

  const BoundaryChart& boundary() const { return chart_; }
  double eps() const { return eps_; }

  /// psi(r, s). Negative r follows the outward normal into the extension.
  Vec2 psi(double r, double s) const;
  /// psi at several depths along one normal geodesic. `depths` must share
  /// one sign and be sorted by increasing magnitude.
  std::vector<CollarSample> shoot(double s, const std::vector<double>& depths) const;

  // Grid filled by normal_collar.
  std::vector<double> r_nodes;
  std::vector<double> s_nodes;
  /// h(r_i, s_k) from the Jacobi field, rows indexed by r.
  Eigen::MatrixXd h;
  /// h(r_i, s_k) from finite differences of psi in s.
  Eigen::MatrixXd h_fd;
  double max_grr_error = 0.0;
  double max_grs_error = 0.0;

 private:
  BoundaryChart chart_;
  double eps_;
};

/// Shoots inward normal geodesics on an (n_r x n_s) grid over [0, eps] x
/// boundary and checks the Gauss lemma there. Throws FocalRadiusError when
/// the normal Jacobi field vanishes or adjacent normal geodesics approach
/// within 1e-3 eps.
CollarChart normal_collar(const MetricSpec& metric, double eps, std::size_t n_r, std::size_t n_s);
CollarChart normal_collar(const BoundaryChart& chart, double eps, std::size_t n_r, std::size_t n_s);

} // namespace geoscatter

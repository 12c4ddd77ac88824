#pragma once

#include <cstddef>
#include <vector>

#include "geoscatter/dynamics/scattering.hpp"

namespace geoscatter {

/// Scattering data sampled on a uniform (s_in, alpha) grid, together with
/// the boundary metric in arclength form (component starts and lengths).
/// The interior metric is not retained. Rows alpha = -pi/2 and +pi/2 hold
/// the glancing limit: exit point equal to the entry point, beta = alpha.
struct ScatterTable {
  std::vector<double> component_start;
  std::vector<double> component_length;
  /// Entry nodes per boundary component.
  std::size_t n_s = 0;
  /// Angle nodes including both glancing endpoints.
  std::size_t n_alpha = 0;
  /// Signed arclength from s_in to s_out along the entry component, the
  /// shorter way round; NaN for trapped rays and exits on another component.
  /// Indexed [(component * n_s + i) * n_alpha + k].
  std::vector<double> offset;
  /// sin(beta) of the exit vector, NaN where offset is NaN.
  std::vector<double> sin_beta;

  double s_node(int component, std::size_t i) const;
  double alpha_node(std::size_t k) const;
};

/// Traces every interior grid entry. Throws ConfigError below 16 entry or
/// 33 angle nodes.
ScatterTable scatter_table(const BoundaryChart& chart, std::size_t n_s, std::size_t n_alpha,
                           double t_max = kDefaultTMax, std::size_t threads = 1);

struct BoundaryDistance {
  double distance = 0.0;
  /// |g(v, nu)| = |cos alpha| of the entry at x selected for x'.
  double projection = 0.0;
  /// |cos alpha| of the other entries at x exiting at x'.
  std::vector<double> competing;
};

/// Distance between the boundary points with arclengths s and s_prime,
/// b = int_0^1 g(S(x, v(t)), gamma'(t)) dt along the boundary arc gamma from
/// s to s_prime, where v(t) is the entry at x exiting at gamma(t) with the
/// smallest |g(v, nu)|. The table is interpolated with local Lagrange
/// polynomials in s_in and alpha. Throws CoverageError when some gamma(t) is
/// hit by no interpolated entry and DomainError for points on different
/// components.
BoundaryDistance boundary_distance_from_scattering(const ScatterTable& table, double s,
                                                   double s_prime);

} // namespace geoscatter

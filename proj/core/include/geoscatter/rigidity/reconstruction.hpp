#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "geoscatter/rigidity/matching.hpp"

namespace geoscatter {

struct ReconstructionOptions {
  /// Outer collar width; nodes sit at outward depths in (eps / 4, eps / 2).
  double eps = 0.6;
  std::size_t layout_depths = 6;
  std::size_t layout_arcs = 24;
  /// Interior polar grid rho_i = fraction * R * (i + 1) / rings,
  /// theta_j = 2 pi j / angles, used for both manifolds.
  std::size_t rings = 20;
  std::size_t angles = 20;
  double fraction = 0.9;
  /// Boundary points pinned to the identity.
  std::size_t boundary_points = 24;
  EmbeddingOptions embedding;
  MatchOptions match;
  std::size_t threads = 1;
};

struct ReconstructedPoint {
  Vec2 x = Vec2::Zero();
  Vec2 y = Vec2::Zero();
  double residual = 0.0;
  /// |(psi^* g2)(x) - g1(x)|_F / |g1(x)|_F with D psi from grid differences;
  /// NaN on boundary points.
  double pullback_error = 0.0;
  /// det D psi; NaN on boundary points.
  double jacobian_det = 0.0;
  bool boundary = false;
  /// |y - reference(x)| when a reference map is given, else NaN.
  double map_error = 0.0;
  int evaluations = 0;
};

struct ReconstructionReport {
  std::uint64_t layout_id = 0;
  /// Interior grid (ring-major) followed by the boundary points.
  std::vector<ReconstructedPoint> points;
  double sup_map_error = 0.0;
  double sup_pullback_error = 0.0;
  /// Largest |y - x| over the boundary points.
  double sup_boundary_displacement = 0.0;
  /// Largest |reference(x) - x| over the boundary points.
  double sup_reference_boundary_displacement = 0.0;
  /// Largest embedding mismatch at the pinned boundary points.
  double max_boundary_residual = 0.0;
  double max_interior_residual = 0.0;
  double min_jacobian_det = 0.0;
  int evaluations = 0;
};

/// Recovers psi: M1 -> M2 with psi^* g2 = g1 from the collar embeddings of
/// two disk scenes sharing their boundary metric: embeds the interior grid
/// of each, matches them, and measures the pullback of g2 against g1.
/// `reference` is the expected map, used only for the reported errors.
/// Throws ConfigError for revolution scenes or differing boundary lengths.
ReconstructionReport reconstruct_isometry(const MetricSpec& g1, const MetricSpec& g2,
                                          const ReconstructionOptions& options = {},
                                          const std::function<Vec2(const Vec2&)>& reference = {});

/// Polar grid of the options on a disk of coordinate radius R (ring-major).
std::vector<Vec2> polar_grid(double radius, const ReconstructionOptions& options);

} // namespace geoscatter

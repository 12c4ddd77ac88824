#pragma once

#include <limits>
#include <optional>

#include "geoscatter/dynamics/flow.hpp"
#include "geoscatter/geometry/boundary.hpp"

namespace geoscatter {

inline constexpr double kDefaultTMax = 50.0;

/// One geodesic's boundary data. `tau` is +infinity on trapped rays.
struct ScatterRecord {
  UnitTangentVector entry;
  std::optional<UnitTangentVector> exit;
  double tau = std::numeric_limits<double>::infinity();
  bool trapped = false;
  std::optional<double> clairaut;
  /// Largest | |v|_g - 1 | seen on accepted steps.
  double speed_drift = 0.0;
  /// Largest drift of the Clairaut constant (revolution scenes).
  double clairaut_drift = 0.0;
};

/// Follows the geodesic through z until it leaves M. z.x must lie in M; a
/// base point on the boundary requires an inward vector. Rays still inside
/// M at t_max are flagged as trapped.
ScatterRecord trace_to_boundary(const MetricSpec& metric, const UnitTangentVector& z,
                                double t_max = kDefaultTMax, const FlowOptions& options = {});

/// Scattering data in boundary coordinates: entry (s_in, alpha), exit
/// (s_out, beta). Angles follow entry_direction / exit_direction.
struct ScatterCoords {
  double s_in = 0.0;
  double angle_in = 0.0;
  double s_out = std::numeric_limits<double>::quiet_NaN();
  double angle_out = std::numeric_limits<double>::quiet_NaN();
  double tau = std::numeric_limits<double>::infinity();
  bool trapped = false;
  double clairaut = std::numeric_limits<double>::quiet_NaN();
};

/// Unit vector on the inward boundary at (s, alpha), |alpha| < pi/2.
UnitTangentVector boundary_entry(const BoundaryChart& chart, double s, double alpha);

ScatterCoords scatter_from_boundary(const BoundaryChart& chart, double s, double alpha,
                                    double t_max = kDefaultTMax, const FlowOptions& options = {});

/// Boundary coordinates of an outgoing record.
ScatterCoords to_coords(const BoundaryChart& chart, const ScatterRecord& record);

} // namespace geoscatter

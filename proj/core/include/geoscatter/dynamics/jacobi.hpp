#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "geoscatter/dynamics/flow.hpp"

namespace geoscatter {

/// Scalar normal Jacobi field J e_perp along a unit-speed geodesic:
/// J'' + K J = 0.
struct JacobiFrame {
  double t = 0.0;
  double j = 0.0;
  double jdot = 0.0;
};

struct JacobiPath {
  /// One frame per accepted integrator step, starting at t = 0.
  std::vector<JacobiFrame> frames;
  /// W = J Jp' - J' Jp against the partner solution Jp with initial data
  /// (-J0', J0), one entry per frame.
  std::vector<double> wronskian;
  /// Times t > 0 at which J changes sign.
  std::vector<double> zeros;
  double end_time = 0.0;
  /// True when the geodesic left `confine` before T.
  bool left_region = false;
};

/// Integrates the Jacobi equation along the geodesic through z for time T,
/// or until the geodesic leaves `confine`.
JacobiPath jacobi_transport(const MetricSpec& metric, const UnitTangentVector& z, double T,
                            double j0, double jdot0, Region confine = Region::extension,
                            const FlowOptions& options = {});

struct MonodromyReport {
  /// A point of the closed orbit with its period.
  UnitTangentVector orbit;
  double period = 0.0;
  int newton_iterations = 0;
  double closure_residual = 0.0;
  /// Linearized return map on (J, J') over one period.
  Mat2 monodromy = Mat2::Identity();
  std::complex<double> eigenvalues[2];
  double det = 1.0;
  /// | lambda_1 lambda_2 - 1 |
  double reciprocity_defect = 0.0;
  /// |trace| > 2: the orbit is a hyperbolic periodic orbit.
  bool hyperbolic = false;
};

/// Refines `guess` to a closed geodesic winding once around a revolution
/// scene (Newton multiple shooting between 8 meridians) and
/// returns the monodromy of the normal Jacobi equation along it. The
/// monodromy is a product of exact exponentials of fourth-order Magnus
/// steps, so det = 1 to rounding.
MonodromyReport closed_geodesic_monodromy(const MetricSpec& metric, const UnitTangentVector& guess,
                                          std::size_t magnus_steps = 2048);

} // namespace geoscatter

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "geoscatter/dynamics/scattering.hpp"

namespace geoscatter {

/// A boundary unit vector with its mu_nu weight |g(v, nu)| relative to
/// ds x d(angle).
struct BoundaryMeasureSample {
  UnitTangentVector z;
  double density = 0.0;
};

/// Throws DomainError when z is not based on the boundary.
BoundaryMeasureSample mu_nu_density(const MetricSpec& metric, const UnitTangentVector& z);

/// A rectangle [s_lo, s_hi] x [angle_lo, angle_hi] in boundary
/// coordinates; the s range must not cross a component end.
struct BoundaryBox {
  double s_lo = 0.0;
  double s_hi = 0.0;
  double angle_lo = 0.0;
  double angle_hi = 0.0;

  bool contains(double s, double angle) const {
    return s >= s_lo && s <= s_hi && angle >= angle_lo && angle <= angle_hi;
  }
  /// Exact mu_nu mass (s_hi - s_lo)(sin angle_hi - sin angle_lo).
  double mass() const;
};

struct UnitarityReport {
  BoundaryBox box;
  /// Analytic mu_nu mass of the exit box.
  double image_mass = 0.0;
  /// Monte Carlo mu_nu mass of the entries scattered into the box.
  double preimage_mass = 0.0;
  double relative_error = 0.0;
};

struct UnitarityRun {
  std::vector<UnitarityReport> boxes;
  std::size_t samples = 0;
  std::size_t trapped = 0;
};

/// Stratified jittered Monte Carlo over the incoming boundary with entry
/// angles drawn from the density cos(alpha)/2, so every sample carries
/// the weight 2 L / samples. Trapped entries are counted and dropped.
UnitarityRun scattering_unitarity(const BoundaryChart& chart, const std::vector<BoundaryBox>& boxes,
                                  std::size_t samples, std::uint64_t seed,
                                  double t_max = kDefaultTMax, std::size_t threads = 1);

struct GlancingSample {
  double s = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  double density = 0.0;
};

struct GlancingReport {
  /// max tau / |g(v, nu)| over all samples.
  double c_max = 0.0;
  /// Least-squares slope of tau against |g(v, nu)| for |g(v, nu)| <= 1e-3.
  double c_fit = 0.0;
  GlancingSample worst;
  std::vector<GlancingSample> samples;
};

/// Traces entries with |g(v, nu)| log-spaced in [1e-6, 0.1] on a grid of
/// boundary points. With `claimed_c` set, throws PropertyFailure at the
/// first sample violating tau <= claimed_c |g(v, nu)|; a trapped sample
/// always violates the bound.
GlancingReport glancing_escape_bound(const BoundaryChart& chart, std::size_t samples,
                                     std::optional<double> claimed_c = std::nullopt,
                                     double t_max = kDefaultTMax, std::size_t threads = 1);

} // namespace geoscatter

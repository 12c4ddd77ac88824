#pragma once

#include <array>

#include "geoscatter/geometry/metric.hpp"

namespace geoscatter {

/// Gauss curvature from the Brioschi formula with centered differences of
/// the metric components, Richardson-extrapolated from steps h and h / 2
/// (chart units).
double brioschi_curvature(const MetricSpec& metric, const Vec2& x, double h = 1e-3);

/// Christoffel symbols from centered differences of the metric components;
/// same layout as GeometryJet::christoffel.
std::array<Mat2, 2> christoffel_differences(const MetricSpec& metric, const Vec2& x,
                                            double h = 1e-4);

} // namespace geoscatter

#pragma once

#include "geoscatter/geometry/metric.hpp"

namespace scenes {

using namespace geoscatter;

inline MetricSpec flat(double radius = 1.0) {
  MetricSpec m;
  m.base = ConformalDisk{FlatFactor{}, radius};
  return m;
}

inline MetricSpec gaussian(double amplitude = 0.3, double width = 0.5, Vec2 center = Vec2(0.1, -0.05)) {
  MetricSpec m;
  m.base = ConformalDisk{GaussianFactor{amplitude, width, center}, 1.0};
  return m;
}

inline MetricSpec poincare(double rho0 = 0.8) {
  MetricSpec m;
  m.base = PoincareDisk{rho0};
  return m;
}

inline MetricSpec cosh_strip(double half_width = 1.0) {
  MetricSpec m;
  m.base = RevolutionStrip{Profile::cosh, half_width};
  return m;
}

} // namespace scenes

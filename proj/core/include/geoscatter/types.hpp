#pragma once

#include <Eigen/Dense>

namespace geoscatter {

/// Chart coordinates of a point of a surface: (x, y) for planar scenes,
/// (r, theta) for surfaces of revolution.
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Region a ray is confined to: the manifold M itself or its extension M_e.
enum class Region { interior, extension };

} // namespace geoscatter

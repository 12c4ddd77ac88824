#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Core>

#include "geoscatter/dynamics/flow.hpp"

namespace geoscatter {

/// A function on M. The support lies in the coordinate disk
/// (support_center, support_radius); the radius is infinite when the
/// function is not compactly supported.
struct ScalarField {
  std::function<double(const Vec2&)> eval;
  Vec2 support_center = Vec2::Zero();
  double support_radius = std::numeric_limits<double>::infinity();

  double operator()(const Vec2& x) const { return eval(x); }
  bool compact() const { return std::isfinite(support_radius); }
};

/// A one-form w_i dx^i with its coordinate Jacobian jacobian(i, j) = d_i w_j.
struct OneForm {
  std::function<Vec2(const Vec2&)> w;
  std::function<Mat2(const Vec2&)> jacobian;
  bool vanishes_on_boundary = false;
};

/// A symmetric 2-tensor f_ij dx^i dx^j.
struct SymTensorField2 {
  std::function<Mat2(const Vec2&)> f;
  Mat2 operator()(const Vec2& x) const { return f(x); }
};

/// A function on the unit tangent bundle.
using SphereFunction = std::function<double(const Vec2& x, const Vec2& v)>;

SphereFunction pi0_star(const ScalarField& f);
/// (x, v) -> w_x(v)
SphereFunction pi1_star(const OneForm& w);
/// (x, v) -> f_x(v, v)
SphereFunction pi2_star(const SymTensorField2& f);

ScalarField constant_field(double value);

/// C-infinity bump amplitude * exp(1 - 1 / (1 - |x - c|^2 / radius^2)).
ScalarField smooth_bump(const Vec2& center, double radius, double amplitude = 1.0);

/// Smoothed indicator of the coordinate disk |x - c| < radius. The
/// transition over |x - c| in [radius - edge, radius + edge] is odd about
/// radius, so every chord through c integrates to exactly 2 radius in flat
/// coordinates.
ScalarField smoothed_disk_indicator(const Vec2& center, double radius, double edge);

/// Gaussian amplitude * exp(-|x - c|^2 / width^2) (not compactly supported).
ScalarField gaussian_field(const Vec2& center, double width, double amplitude = 1.0);

/// w_j = b_j + sum_i a(i, j) x_i
OneForm linear_one_form(const Mat2& a, const Vec2& b);

/// Monomials 1, x, y, x^2, xy, y^2 used by the bubble one-forms.
using BubbleCoefficients = Eigen::Matrix<double, 6, 2>;

/// w_j = (R^2 - |x|^2) sum_m c(m, j) x^m on a planar disk of radius R, so
/// w vanishes on the boundary circle.
OneForm bubble_one_form(double radius, const BubbleCoefficients& c);

/// Coordinate components of a symmetric tensor field from three scalar
/// functions.
SymTensorField2 tensor_field(std::function<double(const Vec2&)> f11,
                             std::function<double(const Vec2&)> f12,
                             std::function<double(const Vec2&)> f22);

/// Smooth step from 0 (u <= 0) to 1 (u >= 1) with step(1 - u) = 1 - step(u).
double smooth_step(double u);

} // namespace geoscatter

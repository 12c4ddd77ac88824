#include "geoscatter/transform/fields.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace geoscatter {

SphereFunction pi0_star(const ScalarField& f) {
  return [f](const Vec2& x, const Vec2&) { return f(x); };
}

SphereFunction pi1_star(const OneForm& w) {
  return [w](const Vec2& x, const Vec2& v) { return w.w(x).dot(v); };
}

SphereFunction pi2_star(const SymTensorField2& f) {
  return [f](const Vec2& x, const Vec2& v) { return v.dot(f(x) * v); };
}

ScalarField constant_field(double value) {
  ScalarField f;
  f.eval = [value](const Vec2&) { return value; };
  return f;
}

ScalarField smooth_bump(const Vec2& center, double radius, double amplitude) {
  ScalarField f;
  f.eval = [center, radius, amplitude](const Vec2& x) {
    const double q = (x - center).squaredNorm() / (radius * radius);
    return q < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  };
  f.support_center = center;
  f.support_radius = radius;
  return f;
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

ScalarField smoothed_disk_indicator(const Vec2& center, double radius, double edge) {
  ScalarField f;
  f.eval = [center, radius, edge](const Vec2& x) {
    const double r = (x - center).norm();
    return 1.0 - smooth_step((r - (radius - edge)) / (2.0 * edge));
  };
  f.support_center = center;
  f.support_radius = radius + edge;
  return f;
}

ScalarField gaussian_field(const Vec2& center, double width, double amplitude) {
  ScalarField f;
  f.eval = [center, width, amplitude](const Vec2& x) {
    return amplitude * std::exp(-(x - center).squaredNorm() / (width * width));
  };
  return f;
}

OneForm linear_one_form(const Mat2& a, const Vec2& b) {
  OneForm w;
  w.w = [a, b](const Vec2& x) -> Vec2 { return b + a.transpose() * x; };
  w.jacobian = [a](const Vec2&) -> Mat2 { return a; };
  return w;
}

OneForm bubble_one_form(double radius, const BubbleCoefficients& c) {
  OneForm w;
  const double r2 = radius * radius;
  w.w = [r2, c](const Vec2& x) -> Vec2 {
    const Eigen::Matrix<double, 6, 1> m(1.0, x[0], x[1], x[0] * x[0], x[0] * x[1], x[1] * x[1]);
    return (r2 - x.squaredNorm()) * (c.transpose() * m);
  };
  w.jacobian = [r2, c](const Vec2& x) -> Mat2 {
    const Eigen::Matrix<double, 6, 1> m(1.0, x[0], x[1], x[0] * x[0], x[0] * x[1], x[1] * x[1]);
    // d/dx and d/dy of the monomials
    const Eigen::Matrix<double, 6, 1> mx(0.0, 1.0, 0.0, 2.0 * x[0], x[1], 0.0);
    const Eigen::Matrix<double, 6, 1> my(0.0, 0.0, 1.0, 0.0, x[0], 2.0 * x[1]);
    const double b = r2 - x.squaredNorm();
    const Vec2 p = c.transpose() * m;
    Mat2 j;
    j.row(0) = (-2.0 * x[0] * p + b * (c.transpose() * mx)).transpose();
    j.row(1) = (-2.0 * x[1] * p + b * (c.transpose() * my)).transpose();
    return j;
  };
  w.vanishes_on_boundary = true;
  return w;
}

SymTensorField2 tensor_field(std::function<double(const Vec2&)> f11,
                             std::function<double(const Vec2&)> f12,
                             std::function<double(const Vec2&)> f22) {
  SymTensorField2 t;
  t.f = [f11 = std::move(f11), f12 = std::move(f12), f22 = std::move(f22)](const Vec2& x) {
    const double o = f12(x);
    Mat2 m;
    m << f11(x), o, o, f22(x);
    return m;
  };
  return t;
}

} // namespace geoscatter

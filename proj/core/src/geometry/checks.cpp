#include "geoscatter/geometry/checks.hpp"

#include <Eigen/Dense>

namespace geoscatter {

namespace {

Mat2 metric_at(const MetricSpec& metric, const Vec2& x) { return evaluate_geometry(metric, x).g; }

double brioschi_step(const MetricSpec& metric, const Vec2& x, double h) {
  const Vec2 du(h, 0.0), dv(0.0, h);
  const Mat2 g = metric_at(metric, x);
  const Mat2 gpu = metric_at(metric, x + du), gmu = metric_at(metric, x - du);
  const Mat2 gpv = metric_at(metric, x + dv), gmv = metric_at(metric, x - dv);
  const Mat2 gpp = metric_at(metric, x + du + dv), gpm = metric_at(metric, x + du - dv);
  const Mat2 gmp = metric_at(metric, x - du + dv), gmm = metric_at(metric, x - du - dv);
  const Mat2 g_u = (gpu - gmu) / (2.0 * h);
  const Mat2 g_v = (gpv - gmv) / (2.0 * h);
  const Mat2 g_uu = (gpu - 2.0 * g + gmu) / (h * h);
  const Mat2 g_vv = (gpv - 2.0 * g + gmv) / (h * h);
  const Mat2 g_uv = (gpp - gpm - gmp + gmm) / (4.0 * h * h);
  const double e = g(0, 0), f = g(0, 1), gg = g(1, 1);
  Eigen::Matrix3d a, b;
  a << -0.5 * g_vv(0, 0) + g_uv(0, 1) - 0.5 * g_uu(1, 1), 0.5 * g_u(0, 0), g_u(0, 1) - 0.5 * g_v(0, 0),
      g_v(0, 1) - 0.5 * g_u(1, 1), e, f,
      0.5 * g_v(1, 1), f, gg;
  b << 0.0, 0.5 * g_v(0, 0), 0.5 * g_u(1, 1),
      0.5 * g_v(0, 0), e, f,
      0.5 * g_u(1, 1), f, gg;
  const double det = e * gg - f * f;
  return (a.determinant() - b.determinant()) / (det * det);
}

} // namespace

double brioschi_curvature(const MetricSpec& metric, const Vec2& x, double h) {
  return (4.0 * brioschi_step(metric, x, 0.5 * h) - brioschi_step(metric, x, h)) / 3.0;
}

std::array<Mat2, 2> christoffel_differences(const MetricSpec& metric, const Vec2& x, double h) {
  const Mat2 g_inv = metric_at(metric, x).inverse();
  std::array<Mat2, 2> dg;  // dg[k] = d_k g
  for (int k = 0; k < 2; ++k) {
    Vec2 step = Vec2::Zero();
    step[k] = h;
    dg[static_cast<std::size_t>(k)] = (metric_at(metric, x + step) - metric_at(metric, x - step)) / (2.0 * h);
  }
  std::array<Mat2, 2> gamma{Mat2::Zero(), Mat2::Zero()};
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        double sum = 0.0;
        for (int l = 0; l < 2; ++l) {
          sum += g_inv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                                dg[static_cast<std::size_t>(l)](i, j));
        }
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * sum;
      }
    }
  }
  return gamma;
}

} // namespace geoscatter

#include "geoscatter/rigidity/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoscatter/errors.hpp"

namespace geoscatter {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Derivative weights at `at` of the Lagrange interpolant through the
/// integer nodes first, ..., first + count - 1 (unit spacing).
std::vector<double> derivative_weights(int first, int count, double at) {
  std::vector<double> w(static_cast<std::size_t>(count), 0.0);
  for (int j = 0; j < count; ++j) {
    double sum = 0.0;
    for (int m = 0; m < count; ++m) {
      if (m == j) continue;
      double term = 1.0 / static_cast<double>(j - m);
      for (int l = 0; l < count; ++l) {
        if (l != j && l != m) term *= (at - (first + l)) / static_cast<double>(j - l);
      }
      sum += term;
    }
    w[static_cast<std::size_t>(j)] = sum;
  }
  return w;
}

/// Spectral derivative on n equispaced periodic samples of [0, 2 pi).
double periodic_derivative(const std::vector<double>& f, std::size_t j) {
  const std::size_t n = f.size();
  const double h = 2.0 * std::acos(-1.0) / static_cast<double>(n);
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == j) continue;
    const auto diff = static_cast<double>(static_cast<long>(j) - static_cast<long>(k));
    const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
    const double x = 0.5 * diff * h;
    d += 0.5 * sign * f[k] * (n % 2 == 0 ? 1.0 / std::tan(x) : 1.0 / std::sin(x));
  }
  return d;
}

} // namespace

std::vector<Vec2> polar_grid(double radius, const ReconstructionOptions& options) {
  std::vector<Vec2> grid;
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::size_t i = 0; i < options.rings; ++i) {
    const double r = options.fraction * radius * static_cast<double>(i + 1) / static_cast<double>(options.rings);
    for (std::size_t j = 0; j < options.angles; ++j) {
      const double t = two_pi * static_cast<double>(j) / static_cast<double>(options.angles);
      grid.emplace_back(r * std::cos(t), r * std::sin(t));
    }
  }
  return grid;
}

ReconstructionReport reconstruct_isometry(const MetricSpec& g1, const MetricSpec& g2,
                                          const ReconstructionOptions& options,
                                          const std::function<Vec2(const Vec2&)>& reference) {
  if (g1.is_revolution() || g2.is_revolution()) {
    throw ConfigError("isometry reconstruction needs disk scenes");
  }
  if (options.rings < 5 || options.angles < 8) {
    throw ConfigError("reconstruction grid needs at least 5 rings and 8 angles");
  }
  if (!(options.fraction > 0.0 && options.fraction < 1.0)) {
    throw ConfigError("grid fraction must lie in (0, 1)");
  }
  const BoundaryChart chart1 = boundary_chart(g1, 512);
  const BoundaryChart chart2 = boundary_chart(g2, 512);
  if (std::abs(chart1.length() - chart2.length()) > 1e-9 * chart1.length()) {
    throw ConfigError("the two scenes do not share their boundary metric");
  }
  const CollarLayout layout =
      collar_layout(chart1, options.eps, options.layout_depths, options.layout_arcs);
  const CollarNodes nodes1 = collar_nodes(g1, layout);
  const CollarNodes nodes2 = collar_nodes(g2, layout);

  const double radius = g1.boundary_extent();
  const std::vector<Vec2> grid = polar_grid(radius, options);
  std::vector<Vec2> sources = grid;
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::size_t k = 0; k < options.boundary_points; ++k) {
    sources.push_back(chart1.at(chart1.length() * static_cast<double>(k) /
                                static_cast<double>(options.boundary_points)).x);
  }
  std::vector<bool> pinned(sources.size(), false);
  std::fill(pinned.begin() + static_cast<std::ptrdiff_t>(grid.size()), pinned.end(), true);

  const std::vector<EmbeddingSample> samples1 =
      embed_points(g1, sources, nodes1, options.embedding, options.threads);
  const std::vector<EmbeddingSample> samples2 =
      embed_points(g2, polar_grid(g2.boundary_extent(), options), nodes2, options.embedding,
                   options.threads);
  const Embedder embed2 = [&](const Vec2& y) { return embed_collar(g2, y, nodes2, options.embedding); };
  const IsometryMap map = match_isometry(samples1, samples2, pinned, options.match, embed2, options.threads);

  ReconstructionReport report;
  report.layout_id = layout.id;
  report.min_jacobian_det = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sources.size(); ++k) {
    ReconstructedPoint p;
    p.x = map.source[k];
    p.y = map.image[k];
    p.residual = map.residual[k];
    p.boundary = map.pinned[k];
    p.evaluations = map.evaluations[k];
    p.map_error = reference ? (p.y - reference(p.x)).norm() : kNaN;
    p.pullback_error = kNaN;
    p.jacobian_det = kNaN;
    report.evaluations += p.evaluations;
    if (p.boundary) {
      report.sup_boundary_displacement = std::max(report.sup_boundary_displacement, (p.y - p.x).norm());
      if (reference) {
        report.sup_reference_boundary_displacement =
            std::max(report.sup_reference_boundary_displacement, (reference(p.x) - p.x).norm());
      }
      report.max_boundary_residual = std::max(report.max_boundary_residual, p.residual);
    } else {
      report.max_interior_residual = std::max(report.max_interior_residual, p.residual);
      if (reference) report.sup_map_error = std::max(report.sup_map_error, p.map_error);
    }
    report.points.push_back(p);
  }

  // D psi from the polar representation (rho', dtheta) of the images
  const std::size_t nr = options.rings, na = options.angles;
  const double dr = options.fraction * radius / static_cast<double>(nr);
  std::vector<double> rho(nr * na), turn(nr * na);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      const Vec2& y = map.image[i * na + j];
      const double theta = two_pi * static_cast<double>(j) / static_cast<double>(na);
      rho[i * na + j] = y.norm();
      turn[i * na + j] = std::remainder(std::atan2(y[1], y[0]) - theta, two_pi);
    }
  }
  for (std::size_t i = 0; i < nr; ++i) {
    const int first = std::clamp(static_cast<int>(i) - 2, 0, static_cast<int>(nr) - 5);
    const std::vector<double> w = derivative_weights(first, 5, static_cast<double>(i));
    std::vector<double> ring_rho(rho.begin() + static_cast<std::ptrdiff_t>(i * na),
                                 rho.begin() + static_cast<std::ptrdiff_t>((i + 1) * na));
    std::vector<double> ring_turn(turn.begin() + static_cast<std::ptrdiff_t>(i * na),
                                  turn.begin() + static_cast<std::ptrdiff_t>((i + 1) * na));
    for (std::size_t j = 0; j < na; ++j) {
      double rho_r = 0.0, turn_r = 0.0;
      for (int m = 0; m < 5; ++m) {
        const std::size_t idx = static_cast<std::size_t>(first + m) * na + j;
        rho_r += w[static_cast<std::size_t>(m)] * rho[idx] / dr;
        turn_r += w[static_cast<std::size_t>(m)] * turn[idx] / dr;
      }
      const double rho_t = periodic_derivative(ring_rho, j);
      const double turn_t = periodic_derivative(ring_turn, j);
      const std::size_t k = i * na + j;
      const double r = dr * static_cast<double>(i + 1);
      const double theta = two_pi * static_cast<double>(j) / static_cast<double>(na);
      const double phase = theta + turn[k];
      const Vec2 er(std::cos(phase), std::sin(phase)), et(-std::sin(phase), std::cos(phase));
      Mat2 polar;  // columns d psi / d rho, d psi / d theta
      polar.col(0) = rho_r * er + rho[k] * turn_r * et;
      polar.col(1) = rho_t * er + rho[k] * (1.0 + turn_t) * et;
      Mat2 inverse_polar;  // d(rho, theta) / dx
      inverse_polar << std::cos(theta), std::sin(theta), -std::sin(theta) / r, std::cos(theta) / r;
      const Mat2 dpsi = polar * inverse_polar;
      const Mat2 ga = evaluate_geometry(g1, map.source[k]).g;
      const Mat2 gb = evaluate_geometry(g2, map.image[k]).g;
      ReconstructedPoint& p = report.points[k];
      p.pullback_error = (dpsi.transpose() * gb * dpsi - ga).norm() / ga.norm();
      p.jacobian_det = dpsi.determinant();
      report.sup_pullback_error = std::max(report.sup_pullback_error, p.pullback_error);
      report.min_jacobian_det = std::min(report.min_jacobian_det, p.jacobian_det);
    }
  }
  return report;
}

} // namespace geoscatter

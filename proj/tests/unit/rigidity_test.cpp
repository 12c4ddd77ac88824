#include <doctest.h>

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "geoscatter/errors.hpp"
#include "geoscatter/rigidity/boundary_distance.hpp"
#include "geoscatter/rigidity/matching.hpp"
#include "geoscatter/rigidity/reconstruction.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace geoscatter;

namespace {

/// Length of the geodesic from s to s_prime found by shooting on the entry
/// angle.
double shooting_distance(const BoundaryChart& chart, double s, double s_prime) {
  const double target = chart.arc_difference(s, s_prime);
  const double sign = target > 0.0 ? 1.0 : -1.0;
  auto miss = [&](double alpha) {
    return chart.arc_difference(s, scatter_from_boundary(chart, s, sign * alpha).s_out) * sign - std::abs(target);
  };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(miss, 0.3, 0.5 * oracle::kPi - 1e-6,
                                                   boost::math::tools::eps_tolerance<double>(48), iters);
  return scatter_from_boundary(chart, s, sign * 0.5 * (r.first + r.second)).tau;
}

} // namespace

TEST_CASE("boundary distance from scattering data") {
  SUBCASE("flat disk: chord length") {
    const BoundaryChart chart = boundary_chart(scenes::flat(), 512);
    const ScatterTable t = scatter_table(chart, 32, 257);
    for (double d : {0.05, 0.2, -0.3}) {
      const BoundaryDistance b = boundary_distance_from_scattering(t, 0.37, chart.advance(0.37, d));
      CHECK(b.distance == doctest::Approx(2.0 * std::sin(std::abs(d) / 2.0)).epsilon(1e-6));
    }
  }
  SUBCASE("Poincare disk: hyperbolic distance") {
    const BoundaryChart chart = boundary_chart(scenes::poincare(), 512);
    const ScatterTable t = scatter_table(chart, 32, 257);
    for (double d : {0.1, -0.4}) {
      const double s2 = chart.advance(1.1, d);
      const BoundaryDistance b = boundary_distance_from_scattering(t, 1.1, s2);
      CHECK(b.distance == doctest::Approx(oracle::poincare_distance(chart.at(1.1).x, chart.at(s2).x)).epsilon(1e-6));
    }
  }
  SUBCASE("cosh strip: Clairaut quadrature") {
    const BoundaryChart chart = boundary_chart(scenes::cosh_strip(), 512);
    const ScatterTable t = scatter_table(chart, 32, 257);
    const oracle::CoshClairaut cl(1.0);
    for (double s : {0.5, chart.component_start(1) + 2.0}) {
      for (double d : {0.1, -0.3}) {
        const BoundaryDistance b = boundary_distance_from_scattering(t, s, chart.advance(s, d));
        CHECK(b.distance == doctest::Approx(cl.boundary_distance(std::abs(d) / std::cosh(1.0))).epsilon(1e-6));
      }
    }
    CHECK_THROWS_AS(boundary_distance_from_scattering(t, 0.5, chart.component_start(1) + 0.5), DomainError);
  }
  SUBCASE("gaussian conformal disk: shooting") {
    const BoundaryChart chart = boundary_chart(scenes::gaussian(), 512);
    const ScatterTable t = scatter_table(chart, 32, 257);
    for (double d : {0.15, -0.35}) {
      const double s2 = chart.advance(2.0, d);
      CHECK(boundary_distance_from_scattering(t, 2.0, s2).distance ==
            doctest::Approx(shooting_distance(chart, 2.0, s2)).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(scatter_table(boundary_chart(scenes::flat(), 256), 8, 65), ConfigError);
}

namespace {

/// Synthetic embedding: Gaussians centered at fixed nodes.
EmbeddingSample synthetic(const Vec2& y, const Vec2& x, std::uint64_t id = 9) {
  static const Vec2 nodes[] = {{1.3, 0.0}, {0.0, 1.3}, {-1.3, 0.0}, {0.0, -1.3}, {0.9, 0.9}, {-0.9, 0.9}};
  EmbeddingSample e;
  e.x = y;
  e.values.resize(6);
  e.errs = Eigen::VectorXd::Zero(6);
  for (int j = 0; j < 6; ++j) e.values[j] = std::exp(-(x - nodes[j]).squaredNorm());
  e.node_set_id = id;
  return e;
}

Vec2 rotate(const Vec2& x, double a) { return {std::cos(a) * x[0] - std::sin(a) * x[1], std::sin(a) * x[0] + std::cos(a) * x[1]}; }

std::vector<Vec2> polar_points(double radius, int rings, int angles, double phase) {
  std::vector<Vec2> pts;
  for (int i = 1; i <= rings; ++i) {
    for (int j = 0; j < angles; ++j) {
      const double r = radius * i / rings, t = 2.0 * oracle::kPi * (j + phase) / angles;
      pts.emplace_back(r * std::cos(t), r * std::sin(t));
    }
  }
  return pts;
}

} // namespace

TEST_CASE("matching recovers a known map between synthetic embeddings") {
  // M2 is M1 rotated by 0.2: Phi_2(y) = Phi_1(R^-1 y), so psi = R
  const double a = 0.2;
  std::vector<EmbeddingSample> s1, s2;
  for (const Vec2& x : polar_points(0.6, 4, 10, 0.0)) s1.push_back(synthetic(x, x));
  for (const Vec2& y : polar_points(0.75, 14, 40, 0.5)) s2.push_back(synthetic(y, rotate(y, -a)));
  const Embedder embed2 = [a](const Vec2& y) { return synthetic(y, rotate(y, -a)); };

  const IsometryMap model = match_isometry(s1, s2);
  MatchOptions tight;
  tight.polish_tolerance = 1e-10;
  tight.min_step = 1e-12;
  const IsometryMap polished = match_isometry(s1, s2, {}, tight, embed2);
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK((model.image[k] - rotate(s1[k].x, a)).norm() < 1e-3);
    CHECK((polished.image[k] - rotate(s1[k].x, a)).norm() < 1e-6);
    CHECK(polished.residual[k] < 1e-8);
  }
  std::vector<bool> boundary(s1.size(), false);
  boundary[0] = true;
  const IsometryMap pinned = match_isometry(s1, s2, boundary);
  CHECK(pinned.pinned[0]);
  CHECK(pinned.image[0] == s1[0].x);
}

TEST_CASE("matching rejects mismatched node sets and ambiguous embeddings") {
  std::vector<EmbeddingSample> s1{synthetic(Vec2(0.1, 0.0), Vec2(0.1, 0.0))};
  std::vector<EmbeddingSample> s2;
  for (const Vec2& y : polar_points(0.7, 6, 16, 0.0)) s2.push_back(synthetic(y, y, 10));
  CHECK_THROWS_AS(match_isometry(s1, s2), ConfigError);

  // radial embeddings cannot tell x from its rotations
  auto radial = [](const Vec2& y) {
    EmbeddingSample e;
    e.x = y;
    e.values = Eigen::Vector2d(y.squaredNorm(), std::exp(-y.squaredNorm()));
    e.errs = Eigen::Vector2d::Zero();
    return e;
  };
  std::vector<EmbeddingSample> r1{radial(Vec2(0.4, 0.0))}, r2;
  for (const Vec2& y : polar_points(0.7, 7, 24, 0.0)) r2.push_back(radial(y));
  CHECK_THROWS_AS(match_isometry(r1, r2), AmbiguityError);
}

TEST_CASE("reconstruction grid") {
  ReconstructionOptions o;
  o.rings = 20;
  o.angles = 20;
  const std::vector<Vec2> g = polar_grid(0.8, o);
  REQUIRE(g.size() == 400);
  CHECK(g.front().norm() == doctest::Approx(0.9 * 0.8 / 20.0));
  CHECK(g.back().norm() == doctest::Approx(0.9 * 0.8));
  CHECK_THROWS_AS(reconstruct_isometry(scenes::cosh_strip(), scenes::cosh_strip(), o), ConfigError);
  CHECK_THROWS_AS(reconstruct_isometry(scenes::poincare(0.8), scenes::poincare(0.7), o), ConfigError);
}

#include <doctest.h>

#include <cmath>

#include "geoscatter/dynamics/jacobi.hpp"
#include "geoscatter/dynamics/measure.hpp"
#include "geoscatter/errors.hpp"
#include "geoscatter/support/random.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace geoscatter;

namespace {

Vec2 unit_euclid(const Vec2& v) { return v.normalized(); }

double polar_angle(const Vec2& x) { return std::atan2(x[1], x[0]); }

} // namespace

TEST_CASE("flat disk scattering follows the chord") {
  const BoundaryChart chart = boundary_chart(scenes::flat(1.0), 512);
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const double s = rng.uniform(0.0, chart.length());
    const double alpha = std::asin(rng.uniform(-0.999, 0.999));
    const ScatterRecord rec = trace_to_boundary(chart.metric(), boundary_entry(chart, s, alpha));
    REQUIRE(rec.exit);
    const oracle::RoundExit o = oracle::flat_chord(1.0, polar_angle(chart.at(s).x), alpha);
    CHECK((rec.exit->x - o.x).norm() < 1e-9);
    CHECK((unit_euclid(rec.exit->v) - o.dir).norm() < 1e-9);
    CHECK(std::abs(rec.tau - o.tau) < 1e-9);
    const ScatterCoords c = to_coords(chart, rec);
    CHECK(c.angle_out == doctest::Approx(alpha).epsilon(1e-9));
  }
}

TEST_CASE("Poincare scattering follows circles orthogonal to the ideal boundary") {
  const double rho0 = 0.8;
  const BoundaryChart chart = boundary_chart(scenes::poincare(rho0), 512);
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.uniform(0.0, chart.length());
    const double alpha = std::asin(rng.uniform(-0.995, 0.995));
    const ScatterRecord rec = trace_to_boundary(chart.metric(), boundary_entry(chart, s, alpha));
    REQUIRE(rec.exit);
    const oracle::RoundExit o = oracle::poincare_arc(rho0, polar_angle(chart.at(s).x), alpha);
    CHECK((rec.exit->x - o.x).norm() < 1e-8);
    CHECK((unit_euclid(rec.exit->v) - o.dir).norm() < 1e-8);
    CHECK(std::abs(rec.tau - o.tau) < 1e-8);
  }
}

TEST_CASE("the geodesic flow preserves speed and is reversible") {
  for (const MetricSpec& m : {scenes::gaussian(), scenes::poincare(), scenes::cosh_strip()}) {
    const BoundaryChart chart = boundary_chart(m, 512);
    Rng rng(13);
    for (int i = 0; i < 60; ++i) {
      const UnitTangentVector z = boundary_entry(chart, rng.uniform(0.0, chart.length()), rng.uniform(-1.4, 1.4));
      const ScatterRecord rec = trace_to_boundary(m, z);
      if (rec.trapped) continue;
      CHECK(rec.speed_drift < 1e-9);
      CHECK(std::abs(speed(m, *rec.exit) - 1.0) < 1e-9);
      const ScatterRecord back = trace_to_boundary(m, reversed(*rec.exit));
      REQUIRE(back.exit);
      CHECK(chart_difference(m, back.exit->x, z.x).norm() < 1e-8);
      CHECK((back.exit->v + z.v).norm() < 1e-8);
      CHECK(back.tau == doctest::Approx(rec.tau).epsilon(1e-9));
    }
  }
}

TEST_CASE("cosh strip exits follow the Clairaut classification") {
  const double a = 1.0;
  const BoundaryChart chart = boundary_chart(scenes::cosh_strip(a), 512);
  const oracle::CoshClairaut cl(a);
  Rng rng(14);
  int tested = 0;
  while (tested < 150) {
    const double s = rng.uniform(0.0, chart.length());
    const double alpha = std::asin(rng.uniform(-0.999, 0.999));
    const double c = std::cosh(a) * std::sin(alpha) * (s < chart.component_start(1) ? -1.0 : 1.0);
    if (std::abs(std::abs(c) - 1.0) < 1e-3) continue;
    ++tested;
    const ScatterCoords sc = scatter_from_boundary(chart, s, alpha);
    REQUIRE_FALSE(sc.trapped);
    CHECK(std::abs(std::abs(sc.clairaut) - std::abs(c)) < 1e-10);
    const bool other = chart.component_of(sc.s_out) != chart.component_of(s);
    CHECK(other == cl.crosses(c));
    CHECK(sc.tau == doctest::Approx(cl.travel_time(c)).epsilon(1e-8));
  }
}

TEST_CASE("entries asymptotic to the waist are trapped") {
  const double a = 1.0;
  const BoundaryChart chart = boundary_chart(scenes::cosh_strip(a), 512);
  const double alpha = std::asin(1.0 / std::cosh(a));
  for (double s : {0.3, 2.0, chart.component_start(1) + 1.0}) {
    for (double sign : {-1.0, 1.0}) {
      const ScatterCoords sc = scatter_from_boundary(chart, s, sign * alpha);
      CHECK(sc.trapped);
      CHECK(std::isinf(sc.tau));
      CHECK(std::isnan(sc.s_out));
    }
  }
  // the waist itself
  const ScatterRecord rec = trace_to_boundary(chart.metric(), make_unit(chart.metric(), Vec2(0.0, 0.0), Vec2(0.0, 1.0)));
  CHECK(rec.trapped);
}

TEST_CASE("the closed geodesic of the cosh strip is hyperbolic with exponent 2 pi") {
  const MetricSpec m = scenes::cosh_strip();
  const MonodromyReport r =
      closed_geodesic_monodromy(m, make_unit(m, Vec2(0.01, 0.0), Vec2(0.0, 1.0)));
  CHECK(r.period == doctest::Approx(2.0 * oracle::kPi).epsilon(1e-9));
  CHECK(r.hyperbolic);
  CHECK(std::abs(r.det - 1.0) < 1e-8);
  double big = std::max(std::abs(r.eigenvalues[0]), std::abs(r.eigenvalues[1]));
  double small = std::min(std::abs(r.eigenvalues[0]), std::abs(r.eigenvalues[1]));
  CHECK(big == doctest::Approx(std::exp(2.0 * oracle::kPi)).epsilon(1e-2));
  CHECK(small == doctest::Approx(std::exp(-2.0 * oracle::kPi)).epsilon(1e-2));
}

TEST_CASE("Jacobi fields on constant curvature") {
  // J'' + K J = 0, J(0) = 0, J'(0) = 1: J = t (K = 0), sinh t (K = -1)
  const MetricSpec flat = scenes::flat(2.0);
  const JacobiPath pf = jacobi_transport(flat, make_unit(flat, Vec2(-1.0, 0.0), Vec2(1.0, 0.2)), 1.5, 0.0, 1.0);
  CHECK(pf.zeros.empty());
  CHECK(pf.frames.back().j == doctest::Approx(pf.frames.back().t).epsilon(1e-10));

  const MetricSpec po = scenes::poincare(0.95);
  const JacobiPath ph = jacobi_transport(po, make_unit(po, Vec2(-0.5, 0.1), Vec2(1.0, 0.0)), 2.0, 0.0, 1.0);
  CHECK(ph.zeros.empty());
  CHECK(ph.frames.back().j == doctest::Approx(std::sinh(ph.frames.back().t)).epsilon(1e-8));
  for (double w : ph.wronskian) CHECK(std::abs(w - ph.wronskian.front()) < 1e-9);
}

TEST_CASE("mu_nu density is |cos alpha| on the boundary") {
  const BoundaryChart chart = boundary_chart(scenes::gaussian(), 256);
  for (double alpha : {-1.2, -0.3, 0.0, 0.7}) {
    const UnitTangentVector z = boundary_entry(chart, 1.3, alpha);
    CHECK(mu_nu_density(chart.metric(), z).density == doctest::Approx(std::cos(alpha)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mu_nu_density(chart.metric(), make_unit(chart.metric(), Vec2(0.1, 0.0), Vec2(1.0, 0.0))),
                  DomainError);
}

TEST_CASE("scattering preserves mu_nu mass") {
  const BoundaryChart chart = boundary_chart(scenes::gaussian(), 512);
  const double l = chart.length();
  const std::vector<BoundaryBox> boxes = {{0.0, 0.5 * l, -0.5, 0.5}, {0.2 * l, 0.7 * l, 0.2, 1.2}};
  const UnitarityRun run = scattering_unitarity(chart, boxes, 20000, 5);
  CHECK(run.trapped == 0);
  for (const UnitarityReport& r : run.boxes) CHECK(r.relative_error < 0.03);
  CHECK(boxes[0].mass() == doctest::Approx(0.5 * l * 2.0 * std::sin(0.5)));
}

TEST_CASE("escape time near glancing is linear in |g(v, nu)|") {
  const GlancingReport flat = glancing_escape_bound(boundary_chart(scenes::flat(), 256), 32);
  CHECK(flat.c_fit == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(flat.c_max <= 2.0 + 1e-6);
  CHECK_NOTHROW(glancing_escape_bound(boundary_chart(scenes::poincare(), 256), 16, 2.0));
  CHECK_THROWS_AS(glancing_escape_bound(boundary_chart(scenes::flat(), 256), 16, 1.5), PropertyFailure);
}

#pragma once

// Closed-form references used by the tests. Nothing here calls the
// integrator or the geometry jets of the library.

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "geoscatter/types.hpp"

namespace oracle {

using geoscatter::Vec2;

inline constexpr double kPi = 3.14159265358979323846;

inline Vec2 rotate90(const Vec2& a) { return {-a[1], a[0]}; }
inline double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Boundary data of a ray entering a Euclidean-round boundary circle of
/// radius rho at polar angle theta, with the entry vector written as
/// cos(alpha) nu + sin(alpha) T in Euclidean-unit form.
struct RoundEntry {
  Vec2 x;
  Vec2 dir;
};

inline RoundEntry round_entry(double rho, double theta, double alpha) {
  const Vec2 outward(std::cos(theta), std::sin(theta));
  const Vec2 tangent = rotate90(outward);
  return {rho * outward, -std::cos(alpha) * outward + std::sin(alpha) * tangent};
}

/// A ray leaving a round boundary: exit point, Euclidean unit direction and
/// travel time.
struct RoundExit {
  Vec2 x;
  Vec2 dir;
  double tau;
};

/// Flat disk: the straight chord.
inline RoundExit flat_chord(double radius, double theta, double alpha) {
  const RoundEntry e = round_entry(radius, theta, alpha);
  const double tau = -2.0 * e.x.dot(e.dir);
  return {e.x + tau * e.dir, e.dir, tau};
}

/// Hyperbolic distance in the unit Poincare disk.
inline double poincare_distance(const Vec2& a, const Vec2& b) {
  const double q = 2.0 * (a - b).squaredNorm() / ((1.0 - a.squaredNorm()) * (1.0 - b.squaredNorm()));
  return std::acosh(1.0 + q);
}

/// Poincare disk truncated at rho0: the geodesic is the circle through x
/// tangent to dir and orthogonal to the unit circle (or a diameter). The
/// exit is the mirror image of x in the line through 0 and the circle
/// center.
inline RoundExit poincare_arc(double rho0, double theta, double alpha) {
  const RoundEntry e = round_entry(rho0, theta, alpha);
  const Vec2 n = rotate90(e.dir);
  const double xn = e.x.dot(n);
  if (std::abs(xn) < 1e-14) {
    const Vec2 y = -e.x;
    return {y, e.dir, poincare_distance(e.x, y)};
  }
  const double r = (1.0 - e.x.squaredNorm()) / (2.0 * xn);
  const Vec2 c = e.x + r * n;
  const Vec2 u = c.normalized();
  const Vec2 y = 2.0 * e.x.dot(u) * u - e.x;
  const double orientation = cross(e.x - c, e.dir) > 0.0 ? 1.0 : -1.0;
  const Vec2 dir = orientation * rotate90((y - c).normalized());
  return {y, dir, poincare_distance(e.x, y)};
}

/// Gauss curvature of exp(2 lambda) |dx|^2 with the Gaussian factor
/// lambda = A exp(-|x - c|^2 / w^2): K = -exp(-2 lambda) Laplacian(lambda).
inline double gaussian_conformal_curvature(double amplitude, double width, const Vec2& center, const Vec2& x) {
  const double q = (x - center).squaredNorm();
  const double w2 = width * width;
  const double lambda = amplitude * std::exp(-q / w2);
  const double laplacian = lambda * (4.0 * q / (w2 * w2) - 4.0 / w2);
  return -std::exp(-2.0 * lambda) * laplacian;
}

/// Geodesics of dr^2 + cosh(r)^2 dtheta^2 through the strip |r| <= a with
/// Clairaut constant c = cosh(r) sin(angle to the meridian).
class CoshClairaut {
 public:
  explicit CoshClairaut(double half_width) : a_(half_width) {}

  /// |c| < 1 crosses to the other boundary circle, |c| > 1 turns back at
  /// cosh r = |c|, |c| = 1 is asymptotic to the waist.
  bool crosses(double c) const { return std::abs(c) < 1.0; }

  /// Travel time inside the strip; infinite for |c| = 1.
  double travel_time(double c) const {
    if (std::abs(c) == 1.0) return std::numeric_limits<double>::infinity();
    return integral(c, [](double f, double root) { return f / root; });
  }

  /// Total change of theta along the geodesic (absolute value).
  double angle_swept(double c) const {
    const double ac = std::abs(c);
    return integral(c, [ac](double f, double root) { return ac / (f * root); });
  }

  /// Length of the shortest geodesic joining two points of one boundary
  /// circle that are dtheta apart (0 < dtheta small enough that it turns
  /// back before the waist).
  double boundary_distance(double dtheta) const {
    const double top = std::cosh(a_);
    auto f = [&](double c) { return angle_swept(c) - dtheta; };
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(f, 1.0 + 1e-12, top * (1.0 - 1e-15),
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
    return travel_time(0.5 * (root.first + root.second));
  }

 private:
  /// Integrates h(f, sqrt(f^2 - c^2)) dr over the geodesic, using r = r* +
  /// u^2 near a turning point so the integrand stays bounded.
  template <class H>
  double integral(double c, H h) const {
    const double ac = std::abs(c);
    using quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    if (ac < 1.0) {
      auto g = [&](double r) {
        const double f = std::cosh(r);
        return h(f, std::sqrt(std::sinh(r) * std::sinh(r) + (1.0 - ac) * (1.0 + ac)));
      };
      return quad::integrate(g, -a_, a_, 15, 1e-14);
    }
    const double r_star = std::acosh(ac);
    const double u_max = std::sqrt(a_ - r_star);
    auto g = [&](double u) {
      const double r = r_star + u * u;
      const double f = std::cosh(r);
      // f^2 - c^2 = (f - c)(f + c), with f - c = 2 sinh((r + r*)/2) sinh(u^2/2)
      const double diff = 2.0 * std::sinh(0.5 * (r + r_star)) * std::sinh(0.5 * u * u);
      return 2.0 * u * h(f, std::sqrt(diff * (f + ac)));
    };
    return 2.0 * quad::integrate(g, 0.0, u_max, 15, 1e-14);
  }

  double a_;
};

/// Normal operator kernel of the Euclidean plane: 2 / |x - x'|.
inline double flat_kernel(double distance) { return 2.0 / distance; }

} // namespace oracle

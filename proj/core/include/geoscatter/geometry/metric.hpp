#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "geoscatter/types.hpp"

namespace geoscatter {

/// lambda == 0: the Euclidean metric.
struct FlatFactor {};

/// lambda(x) = amplitude * exp(-|x - center|^2 / width^2).
struct GaussianFactor {
  double amplitude = 0.0;
  double width = 1.0;
  Vec2 center = Vec2::Zero();
};

/// g = exp(2 lambda(x)) (dx^2 + dy^2) on the Euclidean disk |x| <= radius.
struct ConformalDisk {
  std::variant<FlatFactor, GaussianFactor> factor = FlatFactor{};
  double radius = 1.0;
};

/// g = 4 |dx|^2 / (1 - |x|^2)^2 truncated at Euclidean radius rho0 < 1.
struct PoincareDisk {
  double rho0 = 0.8;
};

enum class Profile { cosh, flat };

/// g = dr^2 + f(r)^2 dtheta^2 on [-half_width, half_width] x circle.
struct RevolutionStrip {
  Profile profile = Profile::cosh;
  double half_width = 1.0;
};

/// phi(x) = s(u) Rot(twist * u) x with u = rho0^2 - |x|^2 and
/// s(u) = 1 + scale * u. Analytic, fixes the circle |x| = rho0 pointwise.
struct TwistDiffeo {
  double scale = 0.0;
  double twist = 0.0;
  double rho0 = 1.0;

  Vec2 apply(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;
  /// Value, Jacobian and the Hessians of both components in one pass.
  void jet(const Vec2& x, Vec2& value, Mat2& jacobian, std::array<Mat2, 2>& hessian) const;
  /// Exact inverse (radial Newton solve followed by un-twisting).
  Vec2 inverse(const Vec2& y) const;
};

/// An analytic model metric on a planar or cylindrical chart together with
/// its strictly larger extension domain. When `pullback` is set the metric
/// is phi^* g_base.
struct MetricSpec {
  std::variant<ConformalDisk, PoincareDisk, RevolutionStrip> base = ConformalDisk{};
  std::optional<TwistDiffeo> pullback;
  double extension_margin = 0.1;

  bool is_revolution() const { return std::holds_alternative<RevolutionStrip>(base); }
  /// Euclidean radius of the boundary circle (planar scenes) or the
  /// half width of the strip (revolution scenes).
  double boundary_extent() const;
  double extension_extent() const { return boundary_extent() + extension_margin; }
  std::string describe() const;
};

/// Throws ConfigError when the parameters cannot describe a valid scene.
void validate(const MetricSpec& metric);

struct GeometryJet {
  Vec2 point = Vec2::Zero();
  Mat2 g = Mat2::Identity();
  Mat2 g_inv = Mat2::Identity();
  /// christoffel[k](i, j) = Gamma^k_{ij}
  std::array<Mat2, 2> christoffel{Mat2::Zero(), Mat2::Zero()};
  /// Gauss curvature (1/length^2).
  double curvature = 0.0;
  double sqrt_det = 1.0;
};

/// Closed-form jet of the metric at `point`; throws DomainError outside the
/// extension domain.
GeometryJet evaluate_geometry(const MetricSpec& metric, const Vec2& point);

/// Same as evaluate_geometry without the domain check. Used on hot paths
/// where the caller already confines the point.
GeometryJet geometry_unchecked(const MetricSpec& metric, const Vec2& point);

/// Level function of the boundary of M (or M_e): negative inside, zero on
/// the boundary, nonvanishing gradient on the boundary.
double boundary_level(const MetricSpec& metric, const Vec2& point, Region region = Region::interior);
Vec2 boundary_level_gradient(const MetricSpec& metric, const Vec2& point);

bool in_extension(const MetricSpec& metric, const Vec2& point);
bool in_manifold(const MetricSpec& metric, const Vec2& point, double tol = 0.0);

/// Reduces the periodic coordinate of revolution scenes to [0, 2 pi).
Vec2 canonical_point(const MetricSpec& metric, const Vec2& point);

/// Coordinate difference a - b with the angular component of revolution
/// scenes wrapped to (-pi, pi].
Vec2 chart_difference(const MetricSpec& metric, const Vec2& a, const Vec2& b);

inline double metric_dot(const Mat2& g, const Vec2& a, const Vec2& b) { return a.dot(g * b); }
inline double metric_norm(const Mat2& g, const Vec2& a) { return std::sqrt(metric_dot(g, a, a)); }

/// Geodesic acceleration -Gamma^k_{ij} v^i v^j.
inline Vec2 geodesic_acceleration(const GeometryJet& jet, const Vec2& v) {
  return Vec2(-v.dot(jet.christoffel[0] * v), -v.dot(jet.christoffel[1] * v));
}

/// A g-orthonormal frame at a point: e1 along the first coordinate axis.
struct OrthonormalFrame {
  Vec2 e1;
  Vec2 e2;
  Vec2 direction(double angle) const { return std::cos(angle) * e1 + std::sin(angle) * e2; }
  double angle_of(const Mat2& g, const Vec2& v) const {
    return std::atan2(metric_dot(g, v, e2), metric_dot(g, v, e1));
  }
};
OrthonormalFrame orthonormal_frame(const Mat2& g);

} // namespace geoscatter

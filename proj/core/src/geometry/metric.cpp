#include "geoscatter/geometry/metric.hpp"

#include <complex>
#include <sstream>

#include "geoscatter/errors.hpp"

namespace geoscatter {

namespace {

using cplx = std::complex<double>;

struct ConformalJet {
  /// exp(2 lambda)
  double e2 = 1.0;
  Vec2 grad = Vec2::Zero();
  double laplacian = 0.0;
};

ConformalJet factor_jet(const FlatFactor&, const Vec2&) { return {}; }

ConformalJet factor_jet(const GaussianFactor& f, const Vec2& x) {
  const Vec2 d = x - f.center;
  const double w2 = f.width * f.width;
  const double lam = f.amplitude * std::exp(-d.squaredNorm() / w2);
  ConformalJet j;
  j.e2 = std::exp(2.0 * lam);
  j.grad = -2.0 * lam * d / w2;
  j.laplacian = lam * (4.0 * d.squaredNorm() / (w2 * w2) - 4.0 / w2);
  return j;
}

GeometryJet conformal_geometry(const ConformalJet& c, const Vec2& x) {
  GeometryJet jet;
  jet.point = x;
  const double e2 = c.e2;
  jet.g = e2 * Mat2::Identity();
  jet.g_inv = Mat2::Identity() / e2;
  jet.sqrt_det = e2;
  for (int k = 0; k < 2; ++k) {
    Mat2& gk = jet.christoffel[k];
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        gk(i, j) = (i == k ? c.grad[j] : 0.0) + (j == k ? c.grad[i] : 0.0) -
                   (i == j ? c.grad[k] : 0.0);
      }
    }
  }
  jet.curvature = -c.laplacian / e2;
  return jet;
}

GeometryJet base_geometry(const ConformalDisk& d, const Vec2& x) {
  return std::visit([&](const auto& f) { return conformal_geometry(factor_jet(f, x), x); },
                    d.factor);
}

GeometryJet base_geometry(const PoincareDisk&, const Vec2& x) {
  const double w = 1.0 - x.squaredNorm();
  ConformalJet c;
  c.e2 = 4.0 / (w * w);
  c.grad = 2.0 * x / w;
  c.laplacian = 4.0 / (w * w);
  return conformal_geometry(c, x);
}

GeometryJet base_geometry(const RevolutionStrip& strip, const Vec2& x) {
  double f = 1.0, fp = 0.0, fpp = 0.0;
  if (strip.profile == Profile::cosh) {
    f = std::cosh(x[0]);
    fp = std::sinh(x[0]);
    fpp = f;
  }
  GeometryJet jet;
  jet.point = x;
  jet.g << 1.0, 0.0, 0.0, f * f;
  jet.g_inv << 1.0, 0.0, 0.0, 1.0 / (f * f);
  jet.sqrt_det = f;
  jet.christoffel[0] << 0.0, 0.0, 0.0, -f * fp;
  jet.christoffel[1] << 0.0, fp / f, fp / f, 0.0;
  jet.curvature = -fpp / f;
  return jet;
}

GeometryJet base_geometry_any(const MetricSpec& m, const Vec2& x) {
  return std::visit([&](const auto& b) { return base_geometry(b, x); }, m.base);
}

GeometryJet pullback_geometry(const MetricSpec& m, const TwistDiffeo& phi, const Vec2& x) {
  Vec2 p;
  Mat2 dphi;
  std::array<Mat2, 2> hess;
  phi.jet(x, p, dphi, hess);
  const GeometryJet b = base_geometry_any(m, p);
  GeometryJet jet;
  jet.point = x;
  jet.g = dphi.transpose() * b.g * dphi;
  jet.g_inv = jet.g.inverse();
  jet.sqrt_det = std::sqrt(jet.g.determinant());
  const Mat2 dinv = dphi.inverse();
  std::array<Mat2, 2> pulled;
  for (int a = 0; a < 2; ++a) {
    pulled[a] = dphi.transpose() * b.christoffel[a] * dphi + hess[a];
  }
  for (int k = 0; k < 2; ++k) {
    jet.christoffel[k] = dinv(k, 0) * pulled[0] + dinv(k, 1) * pulled[1];
  }
  jet.curvature = b.curvature;
  return jet;
}

double wrap_angle(double a) {
  double w = std::fmod(a + kPi, kTwoPi);
  if (w <= 0.0) w += kTwoPi;
  return w - kPi;
}

} // namespace

// ---------------------------------------------------------------------------

Vec2 TwistDiffeo::apply(const Vec2& x) const {
  const double u = rho0 * rho0 - x.squaredNorm();
  const cplx z(x[0], x[1]);
  const cplx w = (1.0 + scale * u) * std::polar(1.0, twist * u) * z;
  return {w.real(), w.imag()};
}

Mat2 TwistDiffeo::jacobian(const Vec2& x) const {
  Vec2 v;
  Mat2 j;
  std::array<Mat2, 2> h;
  jet(x, v, j, h);
  return j;
}

void TwistDiffeo::jet(const Vec2& x, Vec2& value, Mat2& jac, std::array<Mat2, 2>& hess) const {
  // complex products written out: std::complex multiplication goes through
  // the inf/nan-recovering library call
  struct C {
    double re, im;
    C operator*(const C& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    C operator*(double a) const { return {a * re, a * im}; }
    C operator+(const C& o) const { return {re + o.re, im + o.im}; }
    C operator-(const C& o) const { return {re - o.re, im - o.im}; }
  };
  const double u = rho0 * rho0 - x.squaredNorm();
  const double s = 1.0 + scale * u;
  const C z{x[0], x[1]};
  const C E{std::cos(twist * u), std::sin(twist * u)};
  const C P{scale, twist * s};
  const C Ez = E * z;
  const C PEz = P * Ez;
  const C PE = P * E;
  const C ej[2] = {{1.0, 0.0}, {0.0, 1.0}};
  const C w = Ez * s;
  value = {w.re, w.im};
  for (int j = 0; j < 2; ++j) {
    const C d = PEz * (-2.0 * x[j]) + E * ej[j] * s;
    jac(0, j) = d.re;
    jac(1, j) = d.im;
  }
  // i * twist * (scale Ez + P Ez)
  const C q = C{0.0, twist} * (Ez * scale + PEz);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      C h = q * (4.0 * x[j] * x[k]) - PE * ej[k] * (2.0 * x[j]) - PE * ej[j] * (2.0 * x[k]);
      if (j == k) h = h - PEz * 2.0;
      hess[0](j, k) = h.re;
      hess[1](j, k) = h.im;
    }
  }
}

Vec2 TwistDiffeo::inverse(const Vec2& y) const {
  const double target = y.norm();
  if (target == 0.0) return Vec2::Zero();
  double rho = target;
  for (int it = 0; it < 60; ++it) {
    const double val = rho * (1.0 + scale * (rho0 * rho0 - rho * rho)) - target;
    const double der = 1.0 + scale * rho0 * rho0 - 3.0 * scale * rho * rho;
    const double step = val / der;
    rho -= step;
    if (std::abs(step) < 1e-16 * (1.0 + rho)) break;
  }
  const double angle = std::atan2(y[1], y[0]) - twist * (rho0 * rho0 - rho * rho);
  return {rho * std::cos(angle), rho * std::sin(angle)};
}

// ---------------------------------------------------------------------------

double MetricSpec::boundary_extent() const {
  struct Visitor {
    double operator()(const ConformalDisk& d) const { return d.radius; }
    double operator()(const PoincareDisk& p) const { return p.rho0; }
    double operator()(const RevolutionStrip& s) const { return s.half_width; }
  };
  return std::visit(Visitor{}, base);
}

std::string MetricSpec::describe() const {
  std::ostringstream os;
  struct Visitor {
    std::ostringstream& os;
    void operator()(const ConformalDisk& d) const {
      if (std::holds_alternative<FlatFactor>(d.factor)) {
        os << "flat disk R=" << d.radius;
      } else {
        const auto& gf = std::get<GaussianFactor>(d.factor);
        os << "conformal gaussian disk R=" << d.radius << " A=" << gf.amplitude
           << " w=" << gf.width;
      }
    }
    void operator()(const PoincareDisk& p) const { os << "poincare disk rho0=" << p.rho0; }
    void operator()(const RevolutionStrip& s) const {
      os << (s.profile == Profile::cosh ? "cosh" : "flat") << " cylinder a=" << s.half_width;
    }
  };
  std::visit(Visitor{os}, base);
  if (pullback) os << " pulled back by twist(scale=" << pullback->scale << ", twist=" << pullback->twist << ")";
  os << " margin=" << extension_margin;
  return os.str();
}

void validate(const MetricSpec& m) {
  if (!(m.extension_margin > 0.0)) throw ConfigError("extension_margin must be positive");
  if (const auto* d = std::get_if<ConformalDisk>(&m.base)) {
    if (!(d->radius > 0.0)) throw ConfigError("radius must be positive");
    if (const auto* gf = std::get_if<GaussianFactor>(&d->factor)) {
      if (!(gf->width > 0.0)) throw ConfigError("lambda.width must be positive");
    }
  } else if (const auto* p = std::get_if<PoincareDisk>(&m.base)) {
    if (!(p->rho0 > 0.0) || !(m.extension_extent() < 1.0)) {
      throw ConfigError("poincare disk needs 0 < rho0 and rho0 + extension_margin < 1");
    }
  } else {
    const auto& s = std::get<RevolutionStrip>(m.base);
    if (!(s.half_width >= 0.0)) throw ConfigError("half_width must be non-negative");
    if (m.pullback) throw ConfigError("diffeo pullback is only available on planar scenes");
  }
  if (m.pullback) {
    const TwistDiffeo& t = *m.pullback;
    if (std::abs(t.rho0 - m.boundary_extent()) > 1e-14) {
      throw ConfigError("twist diffeo must fix the boundary circle");
    }
    // radial part rho * s(rho) must stay monotone over the extension disk
    const double re = m.extension_extent();
    if (!(1.0 + t.scale * t.rho0 * t.rho0 - 3.0 * t.scale * re * re > 0.0) ||
        !(1.0 + t.scale * (t.rho0 * t.rho0 - re * re) > 0.0)) {
      throw ConfigError("twist diffeo scale too large: map not a diffeomorphism of the extension");
    }
  }
}

GeometryJet geometry_unchecked(const MetricSpec& m, const Vec2& x) {
  if (m.pullback) return pullback_geometry(m, *m.pullback, x);
  return base_geometry_any(m, x);
}

bool in_extension(const MetricSpec& m, const Vec2& x) {
  const double re = m.extension_extent();
  if (m.is_revolution()) return std::abs(x[0]) <= re * (1.0 + 1e-12);
  return x.squaredNorm() <= re * re * (1.0 + 1e-12);
}

bool in_manifold(const MetricSpec& m, const Vec2& x, double tol) {
  return boundary_level(m, x) <= tol;
}

GeometryJet evaluate_geometry(const MetricSpec& m, const Vec2& x) {
  if (!x.allFinite() || !in_extension(m, x)) {
    std::ostringstream os;
    os << "point (" << x[0] << ", " << x[1] << ") outside the extension domain of " << m.describe();
    throw DomainError(os.str());
  }
  return geometry_unchecked(m, x);
}

double boundary_level(const MetricSpec& m, const Vec2& x, Region region) {
  const double e = region == Region::interior ? m.boundary_extent() : m.extension_extent();
  if (m.is_revolution()) return x[0] * x[0] - e * e;
  return x.squaredNorm() - e * e;
}

Vec2 boundary_level_gradient(const MetricSpec& m, const Vec2& x) {
  if (m.is_revolution()) return {2.0 * x[0], 0.0};
  return 2.0 * x;
}

Vec2 canonical_point(const MetricSpec& m, const Vec2& x) {
  if (!m.is_revolution()) return x;
  double th = std::fmod(x[1], kTwoPi);
  if (th < 0.0) th += kTwoPi;
  return {x[0], th};
}

Vec2 chart_difference(const MetricSpec& m, const Vec2& a, const Vec2& b) {
  Vec2 d = a - b;
  if (m.is_revolution()) d[1] = wrap_angle(d[1]);
  return d;
}

OrthonormalFrame orthonormal_frame(const Mat2& g) {
  OrthonormalFrame f;
  f.e1 = Vec2(1.0, 0.0) / std::sqrt(g(0, 0));
  Vec2 e2(0.0, 1.0);
  e2 -= metric_dot(g, e2, f.e1) * f.e1;
  f.e2 = e2 / metric_norm(g, e2);
  return f;
}

} // namespace geoscatter

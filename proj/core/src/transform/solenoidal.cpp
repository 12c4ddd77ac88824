#include "geoscatter/transform/solenoidal.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "geoscatter/errors.hpp"
#include "geoscatter/support/parallel.hpp"
#include "geoscatter/support/random.hpp"
#include "geoscatter/transform/xray.hpp"

namespace geoscatter {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  const auto order = static_cast<int>(n);
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);
  x.clear();
  w.clear();
  for (const double z : zeros) {
    const double d = boost::math::legendre_p_prime(order, z);
    const double weight = 2.0 / ((1.0 - z * z) * d * d);
    x.push_back(z);
    w.push_back(weight);
    if (z != 0.0) {
      x.push_back(-z);
      w.push_back(weight);
    }
  }
}

/// Contraction coordinates of a symmetric tensor: with g^-1 = L L^T,
/// <A, B>_g = t(A) . t(B) for t(A) = (Ahat_11, sqrt2 Ahat_12, Ahat_22),
/// Ahat = L^T A L.
Eigen::Vector3d contracted(const Mat2& l, const Mat2& a) {
  const Mat2 h = l.transpose() * a * l;
  return {h(0, 0), std::sqrt(2.0) * h(0, 1), h(1, 1)};
}

Mat2 inverse_factor(const Mat2& g_inv) { return g_inv.llt().matrixL(); }

/// Bubble-Chebyshev basis (1 - |x|^2 / R^2) T_a(x / R) T_b(y / R).
class BubbleBasis {
 public:
  BubbleBasis(double radius, int degree) : radius_(radius), degree_(degree) {
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) index_.emplace_back(a, b);
    }
  }
  std::size_t size() const { return index_.size(); }

  /// Values and gradients of all scalar basis functions.
  void evaluate(const Vec2& x, VectorXd& value, MatrixXd& gradient) const {
    const double u = x[0] / radius_, v = x[1] / radius_;
    std::vector<double> tu, du, tv, dv;
    chebyshev(u, tu, du);
    chebyshev(v, tv, dv);
    const double bubble = 1.0 - u * u - v * v;
    const Vec2 dbubble(-2.0 * u / radius_, -2.0 * v / radius_);
    value.resize(static_cast<Eigen::Index>(size()));
    gradient.resize(static_cast<Eigen::Index>(size()), 2);
    for (std::size_t m = 0; m < size(); ++m) {
      const auto [a, b] = index_[m];
      const double p = tu[static_cast<std::size_t>(a)] * tv[static_cast<std::size_t>(b)];
      const auto i = static_cast<Eigen::Index>(m);
      value[i] = bubble * p;
      gradient(i, 0) = dbubble[0] * p + bubble * du[static_cast<std::size_t>(a)] * tv[static_cast<std::size_t>(b)] / radius_;
      gradient(i, 1) = dbubble[1] * p + bubble * tu[static_cast<std::size_t>(a)] * dv[static_cast<std::size_t>(b)] / radius_;
    }
  }

 private:
  void chebyshev(double t, std::vector<double>& value, std::vector<double>& deriv) const {
    const auto n = static_cast<std::size_t>(degree_) + 1;
    value.assign(n, 0.0);
    deriv.assign(n, 0.0);
    value[0] = 1.0;
    if (n > 1) {
      value[1] = t;
      deriv[1] = 1.0;
    }
    for (std::size_t k = 2; k < n; ++k) {
      value[k] = 2.0 * t * value[k - 1] - value[k - 2];
      deriv[k] = 2.0 * value[k - 1] + 2.0 * t * deriv[k - 1] - deriv[k - 2];
    }
  }

  double radius_;
  int degree_;
  std::vector<std::pair<int, int>> index_;
};

/// Unknown 2 m + j is the coefficient of phi_m dx^j.
Mat2 basis_derivative(const GeometryJet& jet, double value, const Vec2& grad, int j) {
  Mat2 d = Mat2::Zero();
  d.row(j) += 0.5 * grad.transpose();
  d.col(j) += 0.5 * grad;
  return d - value * jet.christoffel[static_cast<std::size_t>(j)];
}

/// Preconditioned conjugate gradients on the SPD system a c = b.
VectorXd conjugate_gradient(const MatrixXd& a, const VectorXd& b, const SolenoidalOptions& options,
                            std::size_t& iterations, double& residual) {
  const VectorXd inv_diag = a.diagonal().cwiseInverse();
  VectorXd c = VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  iterations = 0;
  residual = 0.0;
  if (bnorm == 0.0) return c;
  VectorXd r = b;
  VectorXd z = inv_diag.cwiseProduct(r);
  VectorXd p = z;
  double rz = r.dot(z);
  std::vector<double> history{1.0};
  while (true) {
    residual = r.norm() / bnorm;
    if (residual <= options.tolerance) return c;
    if (iterations >= options.max_iterations) {
      std::ostringstream os;
      os << "conjugate gradients stalled at relative residual " << residual << " after "
         << iterations << " iterations";
      throw SolverError(os.str(), history);
    }
    const VectorXd ap = a * p;
    const double step = rz / p.dot(ap);
    c += step * p;
    r -= step * ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    ++iterations;
    history.push_back(r.norm() / bnorm);
  }
}

/// Real-valued polynomial of degree <= 3 with coefficients in [-1, 1].
std::function<double(const Vec2&)> random_cubic(Rng& rng, double radius) {
  std::array<double, 10> c{};
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  return [c, radius](const Vec2& x) {
    const double u = x[0] / radius, v = x[1] / radius;
    return c[0] + c[1] * u + c[2] * v + c[3] * u * u + c[4] * u * v + c[5] * v * v +
           c[6] * u * u * u + c[7] * u * u * v + c[8] * u * v * v + c[9] * v * v * v;
  };
}

} // namespace

DiskQuadrature disk_quadrature(const MetricSpec& metric, std::size_t radial_nodes,
                               std::size_t angular_nodes) {
  if (metric.is_revolution()) throw ConfigError("disk quadrature needs a planar disk scene");
  if (radial_nodes < 2 || angular_nodes < 4) throw ConfigError("disk quadrature is too coarse");
  const double radius = metric.boundary_extent();
  std::vector<double> x, w;
  gauss_legendre(radial_nodes, x, w);
  DiskQuadrature q;
  const double dtheta = 2.0 * std::acos(-1.0) / static_cast<double>(angular_nodes);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = 0.5 * radius * (1.0 + x[i]);
    const double wr = 0.5 * radius * w[i] * r;
    for (std::size_t k = 0; k < angular_nodes; ++k) {
      const double t = dtheta * static_cast<double>(k);
      q.points.emplace_back(r * std::cos(t), r * std::sin(t));
      q.weights.push_back(wr * dtheta);
    }
  }
  return q;
}

double tensor_inner(const MetricSpec& metric, const SymTensorField2& f, const SymTensorField2& h,
                    const DiskQuadrature& quad) {
  std::vector<double> terms(quad.points.size());
  for (std::size_t i = 0; i < quad.points.size(); ++i) {
    const GeometryJet jet = evaluate_geometry(metric, quad.points[i]);
    const Mat2 l = inverse_factor(jet.g_inv);
    terms[i] = quad.weights[i] * jet.sqrt_det *
               contracted(l, f(quad.points[i])).dot(contracted(l, h(quad.points[i])));
  }
  return pairwise_sum(terms);
}

double tensor_norm(const MetricSpec& metric, const SymTensorField2& f, const DiskQuadrature& quad) {
  return std::sqrt(std::max(0.0, tensor_inner(metric, f, f, quad)));
}

SolenoidalDecomposition solenoidal_decompose(const MetricSpec& metric, const SymTensorField2& f,
                                             const SolenoidalOptions& options) {
  if (options.degree < 0) throw ConfigError("solenoidal basis degree must be non-negative");
  if (!(options.tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  const DiskQuadrature quad = disk_quadrature(metric, options.radial_nodes, options.angular_nodes);
  const double radius = metric.boundary_extent();
  const auto basis = std::make_shared<BubbleBasis>(radius, options.degree);
  const auto n = static_cast<Eigen::Index>(2 * basis->size());
  const auto q = static_cast<Eigen::Index>(quad.points.size());

  // rows 3 k .. 3 k + 2 hold sqrt(weight) times the contracted coordinates
  MatrixXd design(3 * q, n);
  VectorXd rhs_rows(3 * q);
  VectorXd value;
  MatrixXd grad;
  for (Eigen::Index k = 0; k < q; ++k) {
    const Vec2& x = quad.points[static_cast<std::size_t>(k)];
    const GeometryJet jet = evaluate_geometry(metric, x);
    const Mat2 l = inverse_factor(jet.g_inv);
    const double sw = std::sqrt(quad.weights[static_cast<std::size_t>(k)] * jet.sqrt_det);
    basis->evaluate(x, value, grad);
    for (Eigen::Index m = 0; m < value.size(); ++m) {
      for (int j = 0; j < 2; ++j) {
        const Mat2 d = basis_derivative(jet, value[m], grad.row(m).transpose(), j);
        design.block<3, 1>(3 * k, 2 * m + j) = sw * contracted(l, d);
      }
    }
    rhs_rows.segment<3>(3 * k) = sw * contracted(l, f(x));
  }
  const MatrixXd gram = design.transpose() * design;
  const VectorXd rhs = design.transpose() * rhs_rows;

  SolenoidalDecomposition out;
  const VectorXd coeffs = conjugate_gradient(gram, rhs, options, out.iterations, out.residual);

  OneForm w;
  w.w = [basis, coeffs](const Vec2& x) -> Vec2 {
    VectorXd v;
    MatrixXd g;
    basis->evaluate(x, v, g);
    Vec2 out = Vec2::Zero();
    for (Eigen::Index m = 0; m < v.size(); ++m) {
      out[0] += coeffs[2 * m] * v[m];
      out[1] += coeffs[2 * m + 1] * v[m];
    }
    return out;
  };
  w.jacobian = [basis, coeffs](const Vec2& x) -> Mat2 {
    VectorXd v;
    MatrixXd g;
    basis->evaluate(x, v, g);
    Mat2 jac = Mat2::Zero();
    for (Eigen::Index m = 0; m < v.size(); ++m) {
      for (int j = 0; j < 2; ++j) {
        jac.col(j) += coeffs[2 * m + j] * g.row(m).transpose();
      }
    }
    return jac;
  };
  w.vanishes_on_boundary = true;

  const SymTensorField2 dw = symmetrized_derivative(metric, w);
  out.solenoidal.f = [f, dw](const Vec2& x) { return Mat2(f(x) - dw(x)); };
  out.potential = std::move(w);
  return out;
}

SymTensorField2 airy_tensor(std::function<Eigen::Vector3d(const Vec2&)> hessian) {
  SymTensorField2 t;
  t.f = [hessian = std::move(hessian)](const Vec2& x) {
    const Eigen::Vector3d h = hessian(x);
    Mat2 m;
    m << h[2], -h[1], -h[1], h[0];
    return m;
  };
  return t;
}

BoundaryNorm xray_boundary_norm(const MetricSpec& metric, const SymTensorField2& f,
                                std::size_t boundary_nodes, std::size_t angle_nodes, double t_max,
                                std::size_t threads) {
  const BoundaryChart chart = boundary_chart(metric, 256);
  std::vector<double> x, w;
  gauss_legendre(angle_nodes, x, w);
  const double half_pi = 0.5 * std::acos(-1.0);
  const std::size_t rays = boundary_nodes * x.size();
  const double ds = chart.length() / static_cast<double>(boundary_nodes);
  struct Term {
    double value = 0.0;
    double trapped = 0.0;
  };
  const std::vector<Term> terms = parallel_map(rays, threads, [&](std::size_t r) {
    const std::size_t i = r / x.size(), k = r % x.size();
    const double beta = half_pi * x[k];
    const double weight = ds * half_pi * w[k] * std::cos(beta);
    const BoundaryPoint p = chart.at(ds * static_cast<double>(i));
    const UnitTangentVector z = make_unit(metric, p.x, exit_direction(p, beta));
    try {
      const double v = xray(metric, f, z, t_max).value;
      return Term{weight * v * v, 0.0};
    } catch (const TrappedError&) {
      return Term{0.0, weight};
    }
  });
  std::vector<double> values(rays), trapped(rays);
  for (std::size_t r = 0; r < rays; ++r) {
    values[r] = terms[r].value;
    trapped[r] = terms[r].trapped;
  }
  return {std::sqrt(pairwise_sum(values)), pairwise_sum(trapped)};
}

ProbeReport solenoidal_injectivity_probe(const MetricSpec& metric, const ProbeOptions& options) {
  if (options.trials == 0 || options.calibration_trials == 0) {
    throw ConfigError("the probe needs solenoidal and calibration trials");
  }
  const double radius = metric.boundary_extent();
  const DiskQuadrature quad =
      disk_quadrature(metric, options.solver.radial_nodes, options.solver.angular_nodes);
  Rng rng(options.seed);
  ProbeReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();

  const auto measure = [&](const SymTensorField2& f, bool potential) {
    ProbeTrial t;
    t.potential = potential;
    t.tensor_norm = tensor_norm(metric, f, quad);
    if (!(t.tensor_norm > 0.0)) return false;
    const BoundaryNorm b = xray_boundary_norm(metric, f, options.boundary_nodes, options.angle_nodes,
                                              options.t_max, options.threads);
    t.xray_norm = b.norm;
    t.trapped_measure = b.trapped_measure;
    t.ratio = t.xray_norm / t.tensor_norm;
    report.trials.push_back(t);
    return true;
  };

  for (std::size_t i = 0; i < options.calibration_trials; ++i) {
    BubbleCoefficients c;
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      for (Eigen::Index j = 0; j < 2; ++j) c(r, j) = rng.uniform(-1.0, 1.0);
    }
    measure(symmetrized_derivative(metric, bubble_one_form(radius, c)), true);
    report.noise_floor = std::max(report.noise_floor, report.trials.back().ratio);
  }
  for (std::size_t i = 0; i < options.trials; ++i) {
    const SymTensorField2 f = tensor_field(random_cubic(rng, radius), random_cubic(rng, radius),
                                           random_cubic(rng, radius));
    const SolenoidalDecomposition d = solenoidal_decompose(metric, f, options.solver);
    if (!measure(d.solenoidal, false)) {
      ++report.skipped;
      continue;
    }
    report.min_ratio = std::min(report.min_ratio, report.trials.back().ratio);
  }
  report.passed = std::isfinite(report.min_ratio) && report.min_ratio > 10.0 * report.noise_floor;
  return report;
}

} // namespace geoscatter

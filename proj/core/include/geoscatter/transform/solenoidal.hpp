#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "geoscatter/dynamics/scattering.hpp"
#include "geoscatter/transform/fields.hpp"

namespace geoscatter {

/// Polar Gauss rule on the coordinate disk of M: Gauss-Legendre in the
/// radius, trapezoid in the angle.
struct DiskQuadrature {
  std::vector<Vec2> points;
  /// Coordinate weights (r dr dtheta); multiply by sqrt(det g) for the
  /// metric area element.
  std::vector<double> weights;
};

/// Throws ConfigError on revolution scenes.
DiskQuadrature disk_quadrature(const MetricSpec& metric, std::size_t radial_nodes,
                               std::size_t angular_nodes);

/// <f, h> = int g^ik g^jl f_ij h_kl dV_g
double tensor_inner(const MetricSpec& metric, const SymTensorField2& f, const SymTensorField2& h,
                    const DiskQuadrature& quad);
double tensor_norm(const MetricSpec& metric, const SymTensorField2& f, const DiskQuadrature& quad);

struct SolenoidalOptions {
  /// Highest total degree a + b of the basis one-forms
  /// (1 - |x|^2 / R^2) T_a(x / R) T_b(y / R) dx^j.
  int degree = 10;
  std::size_t radial_nodes = 40;
  std::size_t angular_nodes = 64;
  /// Relative residual of the Galerkin system.
  double tolerance = 1e-8;
  std::size_t max_iterations = 5000;
};

struct SolenoidalDecomposition {
  /// f^s = f - D_g w
  SymTensorField2 solenoidal;
  /// w, vanishing on the boundary.
  OneForm potential;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// f = f^s + D_g w with w = 0 on the boundary and f^s orthogonal to D_g of
/// every basis one-form: the Galerkin form of D_g^* D_g w = D_g^* f, solved
/// by Jacobi-preconditioned conjugate gradients. Disk scenes only (ConfigError
/// otherwise); SolverError with the residual history when the iteration
/// does not reach the tolerance.
SolenoidalDecomposition solenoidal_decompose(const MetricSpec& metric, const SymTensorField2& f,
                                             const SolenoidalOptions& options = {});

/// Symmetric tensor from an Airy stress function A:
/// f_11 = d_yy A, f_12 = -d_xy A, f_22 = d_xx A. Divergence free for the
/// Euclidean metric. Takes the second derivatives (A_xx, A_xy, A_yy).
SymTensorField2 airy_tensor(std::function<Eigen::Vector3d(const Vec2&)> hessian);

struct ProbeOptions {
  std::size_t trials = 20;
  /// Potential tensors D_g w used to measure the quadrature noise floor.
  std::size_t calibration_trials = 10;
  std::size_t boundary_nodes = 48;
  std::size_t angle_nodes = 16;
  std::uint64_t seed = 1;
  double t_max = kDefaultTMax;
  std::size_t threads = 1;
  SolenoidalOptions solver;
};

struct ProbeTrial {
  bool potential = false;
  double tensor_norm = 0.0;
  double xray_norm = 0.0;
  /// xray_norm / tensor_norm
  double ratio = 0.0;
  /// mu_nu measure of the excluded trapped rays.
  double trapped_measure = 0.0;
};

struct ProbeReport {
  std::vector<ProbeTrial> trials;
  /// Largest ratio over the potential tensors.
  double noise_floor = 0.0;
  /// Smallest ratio over the solenoidal tensors.
  double min_ratio = 0.0;
  std::size_t skipped = 0;
  bool passed = false;
};

/// L2(boundary_+, mu_nu) norm of I_2 f against the L2 norm of f, for the
/// solenoidal parts of random polynomial tensors and for potential tensors
/// D_g w of random bubble one-forms. Passes when min_ratio exceeds ten
/// times the noise floor. Zero solenoidal parts are skipped.
ProbeReport solenoidal_injectivity_probe(const MetricSpec& metric, const ProbeOptions& options = {});

/// L2(boundary_+, mu_nu) norm of I_2 f: trapezoid in s, Gauss-Legendre in
/// the exit angle, weight cos(beta).
struct BoundaryNorm {
  double norm = 0.0;
  double trapped_measure = 0.0;
};
BoundaryNorm xray_boundary_norm(const MetricSpec& metric, const SymTensorField2& f,
                                std::size_t boundary_nodes, std::size_t angle_nodes,
                                double t_max = kDefaultTMax, std::size_t threads = 1);

} // namespace geoscatter

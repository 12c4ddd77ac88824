#pragma once

#include <functional>

#include "geoscatter/dynamics/scattering.hpp"
#include "geoscatter/transform/fields.hpp"

namespace geoscatter {

struct XrayValue {
  double value = 0.0;
  /// Length of the geodesic.
  double tau = 0.0;
  /// Incoming end of the geodesic.
  UnitTangentVector entry;
};

/// I u(z) for z on the outgoing boundary: the integral of u(gamma, gamma')
/// over the geodesic that exits at z. Throws TrappedError carrying the
/// partial integral when the geodesic does not reach the boundary
/// backwards within t_max.
XrayValue xray(const MetricSpec& metric, const SphereFunction& u, const UnitTangentVector& z_out,
               double t_max = kDefaultTMax, const FlowOptions& options = {});

/// The same integral over the geodesic entering at z_in.
XrayValue xray_from_entry(const MetricSpec& metric, const SphereFunction& u,
                          const UnitTangentVector& z_in, double t_max = kDefaultTMax,
                          const FlowOptions& options = {});

XrayValue xray(const MetricSpec& metric, const SymTensorField2& f, const UnitTangentVector& z_out,
               double t_max = kDefaultTMax);
XrayValue xray(const MetricSpec& metric, const ScalarField& f, const UnitTangentVector& z_out,
               double t_max = kDefaultTMax);

/// I* u(z) = u(phi_tau(z)): the boundary function u evaluated at the exit
/// of the geodesic through the interior vector z.
double xray_adjoint(const MetricSpec& metric,
                    const std::function<double(const UnitTangentVector&)>& u,
                    const UnitTangentVector& z, double t_max = kDefaultTMax);

/// (D_g w)_ij = (d_i w_j + d_j w_i) / 2 - Gamma^k_ij w_k.
SymTensorField2 symmetrized_derivative(const MetricSpec& metric, const OneForm& w);

} // namespace geoscatter

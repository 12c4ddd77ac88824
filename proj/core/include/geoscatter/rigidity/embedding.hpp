#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "geoscatter/geometry/boundary.hpp"
#include "geoscatter/transform/normal_operator.hpp"

namespace geoscatter {

/// Quadrature nodes of the outer collar, in normal-form coordinates: node
/// (i, k) sits at outward distance depths[i] from the boundary point with
/// arclength s[k]. The layout is metric independent; each metric resolves
/// it through its own normal geodesics.
struct CollarLayout {
  double eps = 0.0;
  /// Outward distances in (eps / 4, eps / 2), increasing.
  std::vector<double> depths;
  std::vector<double> s;
  std::uint64_t id = 0;

  std::size_t size() const { return depths.size() * s.size(); }
};

/// n_r x n_s tensor layout: depths at the midpoints of n_r equal cells of
/// (eps / 4, eps / 2) and s uniform over the boundary (first node at s = 0).
CollarLayout collar_layout(const BoundaryChart& chart, double eps, std::size_t n_r = 6,
                           std::size_t n_s = 24);

/// A layout resolved for one metric: chart positions of the nodes, ordered
/// s-major (all depths of s[0], then s[1], ...).
struct CollarNodes {
  std::uint64_t layout_id = 0;
  std::size_t depth_count = 0;
  std::vector<Vec2> points;
};

/// Throws LayoutError when a node falls inside M or outside the extension.
CollarNodes collar_nodes(const MetricSpec& metric, const CollarLayout& layout);

/// Phi(x): kernel estimates Pi_0(x, node_j) for every collar node.
struct EmbeddingSample {
  Vec2 x = Vec2::Zero();
  Eigen::VectorXd values;
  /// Richardson error of each value.
  Eigen::VectorXd errs;
  std::uint64_t node_set_id = 0;
};

struct EmbeddingOptions {
  /// Chart radius of the coarse mollifier at each node.
  double bandwidth = 0.005;
  std::size_t window_nodes = 32;
};

/// Throws DomainError when x is outside M and LayoutError when a mollifier
/// around a node leaves the extension.
EmbeddingSample embed_collar(const MetricSpec& metric, const Vec2& x, const CollarNodes& nodes,
                             const EmbeddingOptions& options = {});

/// embed_collar over many points, order preserved.
std::vector<EmbeddingSample> embed_points(const MetricSpec& metric, const std::vector<Vec2>& points,
                                          const CollarNodes& nodes,
                                          const EmbeddingOptions& options = {},
                                          std::size_t threads = 1);

} // namespace geoscatter

#include "geoscatter/rigidity/embedding.hpp"

#include <cmath>
#include <sstream>

#include "geoscatter/errors.hpp"
#include "geoscatter/geometry/collar.hpp"
#include "geoscatter/support/hash.hpp"
#include "geoscatter/support/parallel.hpp"

namespace geoscatter {

namespace {

/// Chart distance from x to the boundary of `region` (positive inside).
double chart_depth(const MetricSpec& metric, const Vec2& x, Region region) {
  const double e = region == Region::interior ? metric.boundary_extent() : metric.extension_extent();
  if (metric.is_revolution()) return e - std::abs(x[0]);
  return e - x.norm();
}

} // namespace

CollarLayout collar_layout(const BoundaryChart& chart, double eps, std::size_t n_r, std::size_t n_s) {
  if (!(eps > 0.0)) throw ConfigError("collar width must be positive");
  if (n_r == 0 || n_s == 0) throw ConfigError("collar layout needs at least one node per axis");
  CollarLayout layout;
  layout.eps = eps;
  Fnv1a hash;
  hash.text("collar-layout");
  hash.number(eps);
  for (std::size_t i = 0; i < n_r; ++i) {
    layout.depths.push_back(0.25 * eps + 0.25 * eps * (static_cast<double>(i) + 0.5) / static_cast<double>(n_r));
    hash.number(layout.depths.back());
  }
  for (std::size_t k = 0; k < n_s; ++k) {
    layout.s.push_back(chart.length() * static_cast<double>(k) / static_cast<double>(n_s));
    hash.number(layout.s.back());
  }
  layout.id = hash.value();
  return layout;
}

CollarNodes collar_nodes(const MetricSpec& metric, const CollarLayout& layout) {
  const CollarChart collar(boundary_chart(metric, 512), layout.eps);
  std::vector<double> depths;
  for (double d : layout.depths) depths.push_back(-d);
  CollarNodes nodes;
  nodes.layout_id = layout.id;
  nodes.depth_count = layout.depths.size();
  for (double s : layout.s) {
    std::vector<CollarSample> column;
    try {
      column = collar.shoot(s, depths);
    } catch (const DomainError& e) {
      throw LayoutError(std::string("collar layout does not fit in the extension: ") + e.what());
    }
    for (const CollarSample& c : column) {
      if (boundary_level(metric, c.x, Region::interior) <= 0.0 ||
          boundary_level(metric, c.x, Region::extension) >= 0.0) {
        std::ostringstream os;
        os << "collar node (" << c.x[0] << ", " << c.x[1] << ") at s=" << s
           << " is not in the extension outside M";
        throw LayoutError(os.str());
      }
      nodes.points.push_back(c.x);
    }
  }
  return nodes;
}

EmbeddingSample embed_collar(const MetricSpec& metric, const Vec2& x, const CollarNodes& nodes,
                             const EmbeddingOptions& options) {
  if (!in_manifold(metric, x, 1e-12)) {
    std::ostringstream os;
    os << "embedding point (" << x[0] << ", " << x[1] << ") is outside M";
    throw DomainError(os.str());
  }
  KernelOptions kopt;
  kopt.window_nodes = options.window_nodes;
  kopt.region = Region::extension;
  EmbeddingSample out;
  out.x = x;
  out.node_set_id = nodes.layout_id;
  out.values.resize(static_cast<Eigen::Index>(nodes.points.size()));
  out.errs.resize(out.values.size());
  for (std::size_t j = 0; j < nodes.points.size(); ++j) {
    const Vec2& q = nodes.points[j];
    if (chart_depth(metric, q, Region::extension) <= options.bandwidth) {
      throw LayoutError("mollifier around a collar node leaves the extension");
    }
    // consecutive depths share a boundary point, so the previous geodesic
    // direction is a close starting guess
    if (nodes.depth_count == 0 || j % nodes.depth_count == 0) kopt.initial_direction.reset();
    const KernelEstimate k = normal_operator_kernel(metric, x, q, options.bandwidth, kopt);
    kopt.initial_direction = k.direction;
    out.values[static_cast<Eigen::Index>(j)] = k.value;
    out.errs[static_cast<Eigen::Index>(j)] = k.err;
  }
  return out;
}

std::vector<EmbeddingSample> embed_points(const MetricSpec& metric, const std::vector<Vec2>& points,
                                          const CollarNodes& nodes, const EmbeddingOptions& options,
                                          std::size_t threads) {
  return parallel_map(points.size(), threads,
                      [&](std::size_t i) { return embed_collar(metric, points[i], nodes, options); });
}

} // namespace geoscatter

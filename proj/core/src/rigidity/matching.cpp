#include "geoscatter/rigidity/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "geoscatter/errors.hpp"
#include "geoscatter/support/parallel.hpp"

namespace geoscatter {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Phi(y) ~ C^T b((y - c) / r) with b = (1, u, v, u^2, u v, v^2).
struct QuadraticModel {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  MatrixXd coeffs;  // 6 x m

  static Eigen::Matrix<double, 6, 1> basis(const Vec2& u) {
    Eigen::Matrix<double, 6, 1> b;
    b << 1.0, u[0], u[1], u[0] * u[0], u[0] * u[1], u[1] * u[1];
    return b;
  }
  VectorXd value(const Vec2& y) const {
    return coeffs.transpose() * basis((y - center) / radius);
  }
  /// m x 2
  MatrixXd jacobian(const Vec2& y) const {
    const Vec2 u = (y - center) / radius;
    Eigen::Matrix<double, 6, 2> db;
    db << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 2.0 * u[0], 0.0, u[1], u[0], 0.0, 2.0 * u[1];
    return coeffs.transpose() * db / radius;
  }
};

struct Point {
  Vec2 y;
  const VectorXd* values;
  double weight;
};

QuadraticModel fit_model(const std::vector<Point>& pts, const Vec2& center, double radius) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index m = pts.front().values->size();
  const bool quadratic = n >= 6;
  MatrixXd a = MatrixXd::Zero(n, 6);
  MatrixXd b(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& p = pts[static_cast<std::size_t>(i)];
    a.row(i) = p.weight * QuadraticModel::basis((p.y - center) / radius).transpose();
    b.row(i) = p.weight * p.values->transpose();
  }
  const Eigen::Index cols = quadratic ? 6 : 3;
  QuadraticModel q;
  q.center = center;
  q.radius = radius;
  q.coeffs = MatrixXd::Zero(6, m);
  q.coeffs.topRows(cols) = a.leftCols(cols).colPivHouseholderQr().solve(b);
  return q;
}

/// Gauss-Newton on |Q(y) - target|^2, confined to the model disk.
Vec2 minimize_model(const QuadraticModel& q, const VectorXd& target, Vec2 y) {
  for (int it = 0; it < 30; ++it) {
    const MatrixXd j = q.jacobian(y);
    const VectorXd r = q.value(y) - target;
    const Vec2 step = -(j.transpose() * j).ldlt().solve(j.transpose() * r);
    Vec2 next = y + step;
    const Vec2 off = next - q.center;
    if (off.norm() > q.radius) next = q.center + off * (q.radius / off.norm());
    const double moved = (next - y).norm();
    y = next;
    if (moved < 1e-14 * (1.0 + q.radius)) break;
  }
  return y;
}

} // namespace

IsometryMap match_isometry(const std::vector<EmbeddingSample>& samples1,
                           const std::vector<EmbeddingSample>& samples2,
                           const std::vector<bool>& boundary, const MatchOptions& options,
                           const Embedder& embed2, std::size_t threads) {
  if (samples1.empty() || samples2.empty()) throw ConfigError("matching needs samples of both manifolds");
  const std::uint64_t id = samples1.front().node_set_id;
  for (const auto* set : {&samples1, &samples2}) {
    for (const EmbeddingSample& s : *set) {
      if (s.node_set_id != id) throw ConfigError("embedding samples use different collar layouts");
    }
  }
  if (!boundary.empty() && boundary.size() != samples1.size()) {
    throw ConfigError("boundary mask must match the M1 samples");
  }
  if (options.neighbors < 3 || options.neighbors > samples2.size()) {
    throw ConfigError("matching needs between 3 and |samples2| model neighbours");
  }

  IsometryMap map;
  map.node_set_id = id;
  map.source.resize(samples1.size());
  map.image.resize(samples1.size());
  map.residual.resize(samples1.size());
  map.pinned.assign(samples1.size(), false);
  map.evaluations.assign(samples1.size(), 0);

  parallel_for(samples1.size(), threads, [&](std::size_t i) {
    const EmbeddingSample& s1 = samples1[i];
    const VectorXd& target = s1.values;
    const double scale = target.norm();
    map.source[i] = s1.x;
    if (!boundary.empty() && boundary[i]) {
      map.pinned[i] = true;
      map.image[i] = s1.x;
      map.residual[i] = embed2 ? (embed2(s1.x).values - target).norm() / scale
                               : std::numeric_limits<double>::quiet_NaN();
      map.evaluations[i] = embed2 ? 1 : 0;
      return;
    }

    std::vector<double> mismatch(samples2.size());
    for (std::size_t k = 0; k < samples2.size(); ++k) {
      mismatch[k] = (samples2[k].values - target).norm();
    }
    const std::size_t best = static_cast<std::size_t>(
        std::min_element(mismatch.begin(), mismatch.end()) - mismatch.begin());
    const Vec2 y0 = samples2[best].x;

    std::vector<std::size_t> order(samples2.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(options.neighbors),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        return (samples2[a].x - y0).squaredNorm() < (samples2[b].x - y0).squaredNorm();
                      });
    const double radius = (samples2[order[options.neighbors - 1]].x - y0).norm();

    std::vector<Vec2> rivals;
    for (std::size_t k = 0; k < samples2.size(); ++k) {
      if ((samples2[k].x - y0).norm() > 1.5 * radius &&
          mismatch[k] <= options.ambiguity_ratio * mismatch[best]) {
        rivals.push_back(samples2[k].x);
      }
    }
    if (!rivals.empty()) {
      rivals.insert(rivals.begin(), y0);
      std::ostringstream os;
      os << "embedding of (" << s1.x[0] << ", " << s1.x[1] << ") matches " << rivals.size()
         << " separated samples of M2";
      throw AmbiguityError(os.str(), rivals);
    }

    std::vector<Point> pts;
    for (std::size_t k = 0; k < options.neighbors; ++k) {
      pts.push_back({samples2[order[k]].x, &samples2[order[k]].values, 1.0});
    }
    QuadraticModel q = fit_model(pts, y0, radius);
    Vec2 y = minimize_model(q, target, y0);
    double residual = (q.value(y) - target).norm() / scale;

    int evaluations = 0;
    if (embed2) {
      const auto mismatch_at = [&](const Vec2& p, VectorXd& r) {
        ++evaluations;
        try {
          r = embed2(p).values - target;
          return r.norm() / scale;
        } catch (const DomainError&) {
          return std::numeric_limits<double>::infinity();
        }
      };
      VectorXd r;
      residual = mismatch_at(y, r);
      if (!std::isfinite(residual)) {
        throw DomainError("matched point leaves the domain of the second embedding");
      }
      const auto difference_jacobian = [&]() {
        MatrixXd jac(r.size(), 2);
        for (int d = 0; d < 2; ++d) {
          Vec2 p = y;
          p[d] += options.jacobian_step;
          VectorXd rd;
          if (!std::isfinite(mismatch_at(p, rd))) {
            p[d] = y[d] - options.jacobian_step;
            mismatch_at(p, rd);
            jac.col(d) = (r - rd) / options.jacobian_step;
          } else {
            jac.col(d) = (rd - r) / options.jacobian_step;
          }
        }
        return jac;
      };
      bool differenced = !options.model_jacobian;
      MatrixXd jac;
      if (residual > options.polish_tolerance) jac = differenced ? difference_jacobian() : q.jacobian(y);
      for (std::size_t step = 0; step < options.max_polish_steps && residual > options.polish_tolerance;
           ++step) {
        Vec2 delta = -(jac.transpose() * jac).ldlt().solve(jac.transpose() * r);
        if (delta.norm() < options.min_step) {
          // the model minimizer is stationary for the model Jacobian
          if (differenced) break;
          differenced = true;
          jac = difference_jacobian();
          continue;
        }
        VectorXd r_next;
        double next = mismatch_at(y + delta, r_next);
        for (int halve = 0; halve < 2 && !(next < residual); ++halve) {
          delta *= 0.5;
          next = mismatch_at(y + delta, r_next);
        }
        const bool stalled = !(next < residual) || next > 0.5 * residual;
        if (next < residual) {
          // Broyden update along the accepted step
          jac += (r_next - r - jac * delta) * delta.transpose() / delta.squaredNorm();
          y += delta;
          r = std::move(r_next);
          residual = next;
        }
        if (stalled) {
          // the model Jacobian is replaced once by differences; after that a
          // stall means the mismatch has reached the noise of the kernel
          // estimates
          if (differenced) break;
          differenced = true;
          jac = difference_jacobian();
        }
      }
    }
    map.image[i] = y;
    map.residual[i] = residual;
    map.evaluations[i] = evaluations;
  });
  return map;
}

} // namespace geoscatter

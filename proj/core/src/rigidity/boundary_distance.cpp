#include "geoscatter/rigidity/boundary_distance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "geoscatter/errors.hpp"
#include "geoscatter/support/parallel.hpp"

namespace geoscatter {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kStencil = 8;

/// Lagrange weights of the nodes first, ..., first + kStencil - 1 at u (unit
/// spacing).
std::array<double, kStencil> lagrange_weights(double u, long first) {
  std::array<double, kStencil> w{};
  for (int j = 0; j < kStencil; ++j) {
    double p = 1.0;
    const double xj = static_cast<double>(first + j);
    for (int m = 0; m < kStencil; ++m) {
      if (m != j) p *= (u - static_cast<double>(first + m)) / (xj - static_cast<double>(first + m));
    }
    w[static_cast<std::size_t>(j)] = p;
  }
  return w;
}

int component_of(const ScatterTable& t, double s) {
  return t.component_start.size() > 1 && s >= t.component_start[1] ? 1 : 0;
}

double wrap(double x, double period) {
  const double r = std::fmod(x, period);
  return r < 0.0 ? r + period : r;
}

/// The table rows at one entry point, interpolated in s_in.
struct Column {
  std::vector<double> offset;
  std::vector<double> sin_beta;
};

Column column_at(const ScatterTable& t, int c, double s_local) {
  const double len = t.component_length[static_cast<std::size_t>(c)];
  const auto n = static_cast<long>(t.n_s);
  const double u = wrap(s_local, len) / len * static_cast<double>(n);
  const auto row = [&](long i) {
    const long iw = ((i % n) + n) % n;
    return (static_cast<std::size_t>(c) * t.n_s + static_cast<std::size_t>(iw)) * t.n_alpha;
  };
  Column col;
  col.offset.assign(t.n_alpha, 0.0);
  col.sin_beta.assign(t.n_alpha, 0.0);
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-12) {
    const std::size_t r = row(static_cast<long>(nearest));
    std::copy_n(t.offset.begin() + static_cast<std::ptrdiff_t>(r), t.n_alpha, col.offset.begin());
    std::copy_n(t.sin_beta.begin() + static_cast<std::ptrdiff_t>(r), t.n_alpha, col.sin_beta.begin());
    return col;
  }
  const long first = static_cast<long>(std::floor(u)) - kStencil / 2 + 1;
  const auto w = lagrange_weights(u, first);
  for (int j = 0; j < kStencil; ++j) {
    const std::size_t r = row(first + j);
    for (std::size_t k = 0; k < t.n_alpha; ++k) {
      col.offset[k] += w[static_cast<std::size_t>(j)] * t.offset[r + k];
      col.sin_beta[k] += w[static_cast<std::size_t>(j)] * t.sin_beta[r + k];
    }
  }
  return col;
}

/// Local Lagrange interpolation in alpha of one column channel.
double interpolate_alpha(const ScatterTable& t, const std::vector<double>& values, double alpha) {
  const double u = (alpha + 0.5 * kPi) / kPi * static_cast<double>(t.n_alpha - 1);
  const long last = static_cast<long>(t.n_alpha) - 1;
  const long first = std::clamp(static_cast<long>(std::floor(u)) - kStencil / 2 + 1, 0L, last - kStencil + 1);
  const auto w = lagrange_weights(u, first);
  double sum = 0.0;
  for (int j = 0; j < kStencil; ++j) {
    sum += w[static_cast<std::size_t>(j)] * values[static_cast<std::size_t>(first + j)];
  }
  return sum;
}

/// Entry angles at which the interpolated exit offset equals `target`.
std::vector<double> entry_roots(const ScatterTable& t, const Column& col, double target, double len) {
  std::vector<double> roots;
  const auto f = [&](double a) { return interpolate_alpha(t, col.offset, a) - target; };
  for (std::size_t k = 0; k + 1 < t.n_alpha; ++k) {
    const double fa = col.offset[k] - target, fb = col.offset[k + 1] - target;
    if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
    // the shorter-way offset jumps by one component length on wrapping rays
    if (std::abs(col.offset[k + 1] - col.offset[k]) > 0.25 * len) continue;
    const double a = t.alpha_node(k), b = t.alpha_node(k + 1);
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (fb == 0.0 || (fa > 0.0) == (fb > 0.0)) continue;
    const double ia = f(a), ib = f(b);
    if (!std::isfinite(ia) || !std::isfinite(ib) || (ia > 0.0) == (ib > 0.0)) continue;
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(
        f, a, b, ia, ib,
        [](double lo, double hi) { return std::abs(hi - lo) <= 1e-15 * (1.0 + std::abs(lo)); }, iters);
    roots.push_back(0.5 * (r.first + r.second));
  }
  return roots;
}

} // namespace

double ScatterTable::s_node(int component, std::size_t i) const {
  const auto c = static_cast<std::size_t>(component);
  return component_start[c] + component_length[c] * static_cast<double>(i) / static_cast<double>(n_s);
}

double ScatterTable::alpha_node(std::size_t k) const {
  return -0.5 * kPi + kPi * static_cast<double>(k) / static_cast<double>(n_alpha - 1);
}

ScatterTable scatter_table(const BoundaryChart& chart, std::size_t n_s, std::size_t n_alpha,
                           double t_max, std::size_t threads) {
  if (n_s < 16) throw ConfigError("scatter table needs at least 16 entry nodes per component");
  if (n_alpha < 33) throw ConfigError("scatter table needs at least 33 angle nodes");
  ScatterTable t;
  for (int c = 0; c < chart.components(); ++c) {
    t.component_start.push_back(chart.component_start(c));
    t.component_length.push_back(chart.component_length(c));
  }
  t.n_s = n_s;
  t.n_alpha = n_alpha;
  const std::size_t rows = t.component_start.size() * n_s;
  t.offset.assign(rows * n_alpha, kNaN);
  t.sin_beta.assign(rows * n_alpha, kNaN);
  parallel_for(rows, threads, [&](std::size_t r) {
    const int c = static_cast<int>(r / n_s);
    const double s = t.s_node(c, r % n_s);
    const std::size_t base = r * n_alpha;
    t.offset[base] = 0.0;
    t.sin_beta[base] = -1.0;
    t.offset[base + n_alpha - 1] = 0.0;
    t.sin_beta[base + n_alpha - 1] = 1.0;
    for (std::size_t k = 1; k + 1 < n_alpha; ++k) {
      const ScatterCoords sc = scatter_from_boundary(chart, s, t.alpha_node(k), t_max);
      if (sc.trapped || chart.component_of(sc.s_out) != c) continue;
      t.offset[base + k] = chart.arc_difference(s, sc.s_out);
      t.sin_beta[base + k] = std::sin(sc.angle_out);
    }
  });
  return t;
}

BoundaryDistance boundary_distance_from_scattering(const ScatterTable& table, double s,
                                                   double s_prime) {
  const double total = table.component_start.back() + table.component_length.back();
  const double sw = wrap(s, total), spw = wrap(s_prime, total);
  const int c = component_of(table, sw);
  if (component_of(table, spw) != c) {
    throw DomainError("boundary points lie on different boundary components");
  }
  const double start = table.component_start[static_cast<std::size_t>(c)];
  const double len = table.component_length[static_cast<std::size_t>(c)];
  const double delta = std::remainder(spw - sw, len);
  const Column col = column_at(table, c, sw - start);

  // selected entry for the exit point at offset d: (alpha, |cos alpha|)
  const auto select = [&](double d, std::vector<double>* competing) {
    const std::vector<double> roots = entry_roots(table, col, d, len);
    if (roots.empty()) {
      std::ostringstream os;
      os << "no scattering table entry at s=" << sw << " exits at offset " << d;
      throw CoverageError(os.str());
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < roots.size(); ++i) {
      if (std::abs(std::cos(roots[i])) < std::abs(std::cos(roots[best]))) best = i;
    }
    if (competing != nullptr) {
      for (std::size_t i = 0; i < roots.size(); ++i) {
        if (i != best) competing->push_back(std::abs(std::cos(roots[i])));
      }
    }
    return roots[best];
  };

  BoundaryDistance out;
  if (delta == 0.0) return out;
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const auto& abscissa = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    for (const double sign : {-1.0, 1.0}) {
      if (i == 0 && sign < 0.0 && abscissa[0] == 0.0) continue;
      const double u = 0.5 * (1.0 + sign * abscissa[i]);
      const double alpha = select(u * delta, nullptr);
      sum += 0.5 * weights[i] * interpolate_alpha(table, col.sin_beta, alpha);
    }
  }
  const double alpha = select(delta, &out.competing);
  out.projection = std::abs(std::cos(alpha));
  out.distance = delta * sum;
  return out;
}

} // namespace geoscatter

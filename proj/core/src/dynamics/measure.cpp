#include "geoscatter/dynamics/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoscatter/errors.hpp"
#include "geoscatter/support/parallel.hpp"
#include "geoscatter/support/random.hpp"

namespace geoscatter {

BoundaryMeasureSample mu_nu_density(const MetricSpec& metric, const UnitTangentVector& z) {
  const double e = metric.boundary_extent();
  if (std::abs(boundary_level(metric, z.x)) > 1e-9 * std::max(1.0, e * e)) {
    throw DomainError("mu_nu density needs a base point on the boundary");
  }
  const GeometryJet jet = evaluate_geometry(metric, z.x);
  const Vec2 up = jet.g_inv * boundary_level_gradient(metric, z.x);
  const Vec2 nu = -up / metric_norm(jet.g, up);
  BoundaryMeasureSample m;
  m.z = z;
  m.density = std::min(1.0, std::abs(metric_dot(jet.g, z.v, nu)) / metric_norm(jet.g, z.v));
  return m;
}

double BoundaryBox::mass() const {
  return (s_hi - s_lo) * (std::sin(angle_hi) - std::sin(angle_lo));
}

UnitarityRun scattering_unitarity(const BoundaryChart& chart, const std::vector<BoundaryBox>& boxes,
                                  std::size_t samples, std::uint64_t seed, double t_max,
                                  std::size_t threads) {
  if (samples < 4) throw ConfigError("unitarity check needs at least 4 samples");
  const auto n_s = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  const std::size_t n_u = (samples + n_s - 1) / n_s;
  const std::size_t n = n_s * n_u;
  const double len = chart.length();

  // all jitter is drawn serially so the samples do not depend on threads
  Rng rng(seed);
  std::vector<double> s_in(n), a_in(n);
  for (std::size_t i = 0; i < n_s; ++i) {
    for (std::size_t k = 0; k < n_u; ++k) {
      const std::size_t idx = i * n_u + k;
      s_in[idx] = len * (static_cast<double>(i) + rng.uniform()) / static_cast<double>(n_s);
      const double u = (static_cast<double>(k) + rng.uniform()) / static_cast<double>(n_u);
      a_in[idx] = std::asin(std::clamp(2.0 * u - 1.0, -1.0 + 1e-15, 1.0 - 1e-15));
    }
  }
  const auto out = parallel_map(n, threads, [&](std::size_t i) {
    return scatter_from_boundary(chart, s_in[i], a_in[i], t_max);
  });

  UnitarityRun run;
  run.samples = n;
  const double weight = 2.0 * len / static_cast<double>(n);
  for (const auto& c : out) run.trapped += c.trapped ? 1 : 0;
  for (const BoundaryBox& box : boxes) {
    std::vector<double> hits(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!out[i].trapped && box.contains(out[i].s_out, out[i].angle_out)) hits[i] = weight;
    }
    UnitarityReport r;
    r.box = box;
    r.image_mass = box.mass();
    r.preimage_mass = pairwise_sum(hits);
    r.relative_error = std::abs(r.preimage_mass - r.image_mass) / r.image_mass;
    run.boxes.push_back(r);
  }
  return run;
}

GlancingReport glancing_escape_bound(const BoundaryChart& chart, std::size_t samples,
                                     std::optional<double> claimed_c, double t_max,
                                     std::size_t threads) {
  if (samples < 4) throw ConfigError("glancing bound needs at least 4 samples");
  const auto n_s = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  const std::size_t n_c = (samples + n_s - 1) / n_s;
  const double lo = std::log(1e-6), hi = std::log(0.1);

  GlancingReport rep;
  rep.samples.resize(n_s * n_c);
  for (std::size_t i = 0; i < n_s; ++i) {
    for (std::size_t k = 0; k < n_c; ++k) {
      GlancingSample& g = rep.samples[i * n_c + k];
      g.s = chart.length() * (static_cast<double>(i) + 0.5) / static_cast<double>(n_s);
      const double t = n_c == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n_c - 1);
      g.density = std::exp(lo + (hi - lo) * t);
      const double side = (i + k) % 2 == 0 ? 1.0 : -1.0;
      g.alpha = side * std::acos(g.density);
    }
  }
  parallel_for(rep.samples.size(), threads, [&](std::size_t i) {
    GlancingSample& g = rep.samples[i];
    g.tau = scatter_from_boundary(chart, g.s, g.alpha, t_max).tau;
  });

  double num = 0.0, den = 0.0;
  for (const GlancingSample& g : rep.samples) {
    const double ratio = g.tau / g.density;
    if (ratio > rep.c_max || !std::isfinite(ratio)) {
      rep.c_max = ratio;
      rep.worst = g;
    }
    if (g.density <= 1e-3) {
      num += g.tau * g.density;
      den += g.density * g.density;
    }
    if (claimed_c && !(g.tau <= *claimed_c * g.density)) {
      std::ostringstream w;
      w.precision(17);
      w << "s=" << g.s << " alpha=" << g.alpha << " tau=" << g.tau << " |g(v,nu)|=" << g.density;
      throw PropertyFailure("escape time exceeds C |g(v, nu)| with C=" + std::to_string(*claimed_c),
                            w.str());
    }
  }
  rep.c_fit = den > 0.0 ? num / den : 0.0;
  return rep;
}

} // namespace geoscatter

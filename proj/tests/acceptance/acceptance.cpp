// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <CLI11.hpp>

#include "commands.hpp"
#include "geoscatter/dynamics/jacobi.hpp"
#include "geoscatter/dynamics/measure.hpp"
#include "geoscatter/errors.hpp"
#include "geoscatter/geometry/checks.hpp"
#include "geoscatter/rigidity/boundary_distance.hpp"
#include "geoscatter/support/parallel.hpp"
#include "geoscatter/support/random.hpp"
#include "geoscatter/transform/normal_operator.hpp"
#include "geoscatter/transform/solenoidal.hpp"
#include "geoscatter/transform/xray.hpp"
#include "oracles.hpp"
#include "output.hpp"
#include "scene.hpp"
#include "scenes.hpp"

using namespace geoscatter;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::size_t g_threads = 1;
fs::path g_out;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

/// Rows of a CSV written by the command layer, keyed by column name.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  const std::vector<std::string> header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    const std::vector<std::string> cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

double polar_angle(const Vec2& x) { return std::atan2(x[1], x[0]); }

// 1 ------------------------------------------------------------------------
Outcome flat_scattering() {
  const BoundaryChart chart = boundary_chart(scenes::flat(), 512);
  Rng rng(101);
  const std::size_t n = 10000;
  std::vector<std::pair<double, double>> entries(n);
  for (auto& e : entries) e = {rng.uniform(0.0, chart.length()), std::asin(rng.uniform(-1.0, 1.0))};
  const std::vector<double> err = parallel_map(n, g_threads, [&](std::size_t i) {
    const auto [s, alpha] = entries[i];
    const ScatterRecord rec = trace_to_boundary(chart.metric(), boundary_entry(chart, s, alpha));
    if (!rec.exit) return std::numeric_limits<double>::infinity();
    const oracle::RoundExit o = oracle::flat_chord(1.0, polar_angle(chart.at(s).x), alpha);
    return std::max({(rec.exit->x - o.x).norm(), (rec.exit->v.normalized() - o.dir).norm(), std::abs(rec.tau - o.tau)});
  });
  const double e = max_of(err);
  return {e < 1e-8, "max error " + fmt(e) + " over " + std::to_string(n) + " entries (< 1e-8)"};
}

// 2 ------------------------------------------------------------------------
Outcome poincare_scattering() {
  const double rho0 = 0.8;
  const BoundaryChart chart = boundary_chart(scenes::poincare(rho0), 512);
  Rng rng(102);
  const std::size_t n = 1000;
  std::vector<std::pair<double, double>> entries(n);
  for (auto& e : entries) e = {rng.uniform(0.0, chart.length()), std::asin(rng.uniform(-1.0, 1.0))};
  const std::vector<double> err = parallel_map(n, g_threads, [&](std::size_t i) {
    const auto [s, alpha] = entries[i];
    const ScatterRecord rec = trace_to_boundary(chart.metric(), boundary_entry(chart, s, alpha));
    if (!rec.exit) return std::numeric_limits<double>::infinity();
    const oracle::RoundExit o = oracle::poincare_arc(rho0, polar_angle(chart.at(s).x), alpha);
    return std::max({(rec.exit->x - o.x).norm(), (rec.exit->v.normalized() - o.dir).norm(), std::abs(rec.tau - o.tau)});
  });
  const double e = max_of(err);
  return {e < 1e-6, "max error " + fmt(e) + " over " + std::to_string(n) + " entries vs geodesic circles (< 1e-6)"};
}

// 3 ------------------------------------------------------------------------
Outcome curvature() {
  double k_err = 0.0, fd_err = 0.0;
  std::size_t points = 0;
  for (const MetricSpec& m : {scenes::poincare(), scenes::cosh_strip()}) {
    const double e = m.boundary_extent();
    for (int i = 0; i < 48; ++i) {
      for (int j = 0; j < 48; ++j) {
        const double u = -e + 2.0 * e * (i + 0.5) / 48.0;
        Vec2 x;
        if (m.is_revolution()) {
          x = Vec2(u, 2.0 * oracle::kPi * j / 48.0);
        } else {
          x = Vec2(u, -e + 2.0 * e * (j + 0.5) / 48.0);
          if (x.norm() >= e) continue;
        }
        ++points;
        const double k = evaluate_geometry(m, x).curvature;
        k_err = std::max(k_err, std::abs(k + 1.0));
        fd_err = std::max(fd_err, std::abs(brioschi_curvature(m, x) - k));
      }
    }
  }
  return {k_err < 1e-8 && fd_err < 1e-6, "max |K + 1| " + fmt(k_err) + " (< 1e-8), Brioschi difference " + fmt(fd_err) +
                                             " (< 1e-6) at " + std::to_string(points) + " points"};
}

// 4 ------------------------------------------------------------------------
Outcome hyperbolicity() {
  const double a = 1.0;
  const MetricSpec m = scenes::cosh_strip(a);
  const MonodromyReport mono = closed_geodesic_monodromy(m, make_unit(m, Vec2(0.02, 0.0), Vec2(0.0, 1.0)));
  const double big = std::max(std::abs(mono.eigenvalues[0]), std::abs(mono.eigenvalues[1]));
  const double small = std::min(std::abs(mono.eigenvalues[0]), std::abs(mono.eigenvalues[1]));
  const double e_big = std::abs(big / std::exp(2.0 * oracle::kPi) - 1.0);
  const double e_small = std::abs(small / std::exp(-2.0 * oracle::kPi) - 1.0);
  const double det_err = std::abs(mono.det - 1.0);

  const BoundaryChart chart = boundary_chart(m, 512);
  const oracle::CoshClairaut cl(a);
  Rng rng(104);
  std::vector<std::pair<double, double>> entries;
  // entries asymptotic to the waist
  const double glide = std::asin(1.0 / std::cosh(a));
  for (int k = 0; k < 20; ++k) entries.emplace_back(chart.length() * (k + 0.5) / 20.0, (k % 2 ? 1.0 : -1.0) * glide);
  while (entries.size() < 1000) entries.emplace_back(rng.uniform(0.0, chart.length()), std::asin(rng.uniform(-1.0, 1.0)));
  const double t_max = kDefaultTMax;
  struct Verdict {
    bool skip = false, agree = false;
  };
  const std::vector<Verdict> v = parallel_map(entries.size(), g_threads, [&](std::size_t i) {
    const auto [s, alpha] = entries[i];
    const ScatterCoords sc = scatter_from_boundary(chart, s, alpha, t_max);
    // clairaut constant of the entry, up to the orientation of the component
    const double c = snapped_clairaut(std::cosh(a) * std::sin(alpha));
    const double tau = cl.travel_time(c);
    Verdict out;
    if (std::abs(tau - t_max) < 1.0) {
      out.skip = true;
      return out;
    }
    const bool trapped = tau > t_max;
    out.agree = sc.trapped == trapped;
    if (out.agree && !trapped) {
      const bool other = chart.component_of(sc.s_out) != chart.component_of(s);
      out.agree = other == cl.crosses(c);
    }
    return out;
  });
  std::size_t skipped = 0, disagree = 0;
  for (const Verdict& x : v) {
    skipped += x.skip ? 1 : 0;
    disagree += (!x.skip && !x.agree) ? 1 : 0;
  }
  const bool ok = e_big < 0.01 && e_small < 0.01 && det_err < 1e-8 && disagree == 0;
  return {ok, "eigenvalue errors " + fmt(e_big) + ", " + fmt(e_small) + " (< 1%), |det - 1| " + fmt(det_err) +
                  " (< 1e-8), Clairaut disagreements " + std::to_string(disagree) + " of " +
                  std::to_string(entries.size() - skipped) + " (" + std::to_string(skipped) + " within 1 of t_max)"};
}

// 5 ------------------------------------------------------------------------
Outcome conjugate_points() {
  std::size_t rays = 0, recrossings = 0;
  for (const MetricSpec& m : {scenes::poincare(), scenes::cosh_strip()}) {
    const BoundaryChart chart = boundary_chart(m, 512);
    Rng rng(105);
    std::vector<std::pair<double, double>> entries(1000);
    for (auto& e : entries) e = {rng.uniform(0.0, chart.length()), std::asin(rng.uniform(-1.0, 1.0))};
    const std::vector<std::size_t> zeros = parallel_map(entries.size(), g_threads, [&](std::size_t i) {
      const UnitTangentVector z = boundary_entry(chart, entries[i].first, entries[i].second);
      const ScatterRecord rec = trace_to_boundary(m, z);
      const double t = rec.trapped ? kDefaultTMax : rec.tau;
      return jacobi_transport(m, z, t, 0.0, 1.0, Region::extension).zeros.size();
    });
    for (std::size_t z : zeros) recrossings += z;
    rays += entries.size();
  }
  return {recrossings == 0, std::to_string(recrossings) + " Jacobi re-crossings over " + std::to_string(rays) +
                                " rays on the Poincare and cosh scenes"};
}

// 6 ------------------------------------------------------------------------
Outcome unitarity() {
  double worst = 0.0;
  std::size_t trapped = 0, boxes = 0;
  for (const MetricSpec& m : {scenes::gaussian(), scenes::poincare(), scenes::cosh_strip()}) {
    const BoundaryChart chart = boundary_chart(m, 512);
    const double l0 = chart.component_length(0);
    const std::vector<BoundaryBox> b = {{0.0, 0.5 * l0, -0.6, 0.4}, {0.3 * l0, 0.9 * l0, 0.1, 1.3},
                                        {0.1 * l0, 0.4 * l0, -1.4, -0.2}};
    const UnitarityRun run = scattering_unitarity(chart, b, 100000, 106, kDefaultTMax, g_threads);
    for (const UnitarityReport& r : run.boxes) worst = std::max(worst, r.relative_error);
    trapped += run.trapped;
    boxes += run.boxes.size();
  }
  return {worst < 0.01, "max relative mu_nu mass defect " + fmt(worst) + " over " + std::to_string(boxes) +
                            " boxes at 1e5 samples per scene (< 1%), " + std::to_string(trapped) + " trapped dropped"};
}

// 7 ------------------------------------------------------------------------
Outcome glancing() {
  std::string detail;
  bool ok = true;
  for (const MetricSpec& m : {scenes::flat(), scenes::gaussian(), scenes::poincare(), scenes::cosh_strip()}) {
    const BoundaryChart chart = boundary_chart(m, 512);
    // near glancing tau ~ 2 |g(v, nu)| / II
    const double claimed = 1.1 * 2.0 / chart.min_second_ff();
    try {
      const GlancingReport r = glancing_escape_bound(chart, 64, claimed, kDefaultTMax, g_threads);
      detail += m.describe() + ": C_max " + fmt(r.c_max) + " <= " + fmt(claimed) + "; ";
      if (!m.is_revolution() && std::holds_alternative<ConformalDisk>(m.base) &&
          std::holds_alternative<FlatFactor>(std::get<ConformalDisk>(m.base).factor)) {
        const double e = std::abs(r.c_fit / 2.0 - 1.0);
        ok = ok && e < 0.01;
        detail += "flat fitted C " + fmt(r.c_fit) + " (within " + fmt(e) + " of 2); ";
      }
    } catch (const PropertyFailure& f) {
      ok = false;
      detail += m.describe() + ": bound violated at " + f.witness() + "; ";
    }
  }
  return {ok, detail};
}

// 8 ------------------------------------------------------------------------
Outcome kernel_asymptotics() {
  const std::vector<std::pair<std::string, std::string>> scenes_text = {
      {"flat", "metric = flat\n"},
      {"poincare", "metric = poincare\nkernel.center = 0.1, -0.1\n"},
      {"cosh", "metric = cosh\nkernel.center = 0.2, 1.0\n"},
  };
  std::string detail;
  bool ok = true;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [name, text] : scenes_text) {
    const cli::SceneConfig scene = cli::parse_scene(text + "kernel.separations = 0.02, 0.0268, 0.0359, 0.0482, "
                                                           "0.0646, 0.0866, 0.116, 0.155, 0.2\n");
    cli::RunFlags flags;
    flags.threads = g_threads;
    flags.log = nullptr;
    cli::OutputDir out(g_out / ("kernel_" + name));
    cli::run_kernel(scene, flags, out);
    double slope = 0.0, dslope = 0.0;
    for (const auto& row : read_csv(out.path() / "kernel_fit.csv")) {
      (row.at("quantity") == "value" ? slope : dslope) = std::stod(row.at("slope"));
    }
    const bool s_ok = std::abs(slope + 1.0) <= 0.05 && std::abs(dslope + 2.0) <= 0.1;
    detail += name + " slope " + fmt(slope) + ", derivative slope " + fmt(dslope);
    ok = ok && s_ok;
    if (name == "flat") {
      double worst = 0.0;
      for (const auto& row : read_csv(out.path() / "kernel.csv")) {
        const double d = std::stod(row.at("distance"));
        worst = std::max(worst, std::abs(std::stod(row.at("value")) / oracle::flat_kernel(d) - 1.0));
      }
      ok = ok && worst < 0.02;
      detail += ", max deviation from 2/d " + fmt(worst);
    }
    detail += "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 300.0;
  return {ok, detail + fmt(secs) + " s (< 300 s)"};
}

// 9 ------------------------------------------------------------------------
Outcome kernel_symmetry() {
  std::size_t violations = 0, pairs = 0;
  double worst = 0.0;
  for (const MetricSpec& m : {scenes::gaussian(), scenes::poincare(), scenes::cosh_strip()}) {
    Rng rng(109);
    std::vector<std::pair<Vec2, Vec2>> pp;
    const double e = m.boundary_extent();
    while (pp.size() < 50) {
      Vec2 x(rng.uniform(-0.6 * e, 0.6 * e), rng.uniform(-0.6 * e, 0.6 * e));
      if (m.is_revolution()) x[1] = rng.uniform(0.0, 2.0 * oracle::kPi);
      else if (x.norm() > 0.6 * e) continue;
      const double sep = rng.uniform(0.05, 0.25) * e, dir = rng.uniform(0.0, 2.0 * oracle::kPi);
      const Vec2 xp = x + sep * Vec2(std::cos(dir), std::sin(dir));
      if (!in_manifold(m, xp) || (!m.is_revolution() && xp.norm() > 0.75 * e)) continue;
      pp.emplace_back(x, xp);
    }
    const std::vector<double> ratio = parallel_map(pp.size(), g_threads, [&](std::size_t i) {
      const double h = 0.1 * chart_difference(m, pp[i].second, pp[i].first).norm();
      const KernelEstimate a = normal_operator_kernel(m, pp[i].first, pp[i].second, h);
      const KernelEstimate b = normal_operator_kernel(m, pp[i].second, pp[i].first, h);
      return std::abs(a.value - b.value) / (a.err + b.err);
    });
    for (double r : ratio) {
      violations += r > 1.0 ? 1 : 0;
      worst = std::max(worst, r);
    }
    pairs += pp.size();
  }
  return {violations == 0, std::to_string(violations) + " of " + std::to_string(pairs) +
                               " pairs exceed the combined Richardson error; max |K(x,x') - K(x',x)| / err " + fmt(worst)};
}

// 10 -----------------------------------------------------------------------
Outcome potential_annihilation() {
  double worst = 0.0;
  std::size_t rays = 0;
  for (const MetricSpec& m : {scenes::flat(), scenes::poincare(), scenes::gaussian()}) {
    const BoundaryChart chart = boundary_chart(m, 512);
    Rng rng(110);
    for (int form = 0; form < 10; ++form) {
      BubbleCoefficients c;
      for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = rng.uniform(-1.0, 1.0);
      const SymTensorField2 f = symmetrized_derivative(m, bubble_one_form(m.boundary_extent(), c));
      std::vector<std::pair<double, double>> exits(1000);
      for (auto& e : exits) e = {rng.uniform(0.0, chart.length()), std::asin(rng.uniform(-1.0, 1.0))};
      const std::vector<double> r = parallel_map(exits.size(), g_threads, [&](std::size_t i) {
        const BoundaryPoint p = chart.at(exits[i].first);
        const XrayValue v = xray(m, f, make_unit(m, p.x, exit_direction(p, exits[i].second)));
        return std::abs(v.value) / (1e-6 * (1.0 + v.tau));
      });
      worst = std::max(worst, max_of(r));
      rays += exits.size();
    }
  }
  return {worst < 1.0, "max |I2(D w)| / (1e-6 (1 + tau)) = " + fmt(worst) + " over " + std::to_string(rays) +
                           " rays, 10 forms per disk scene"};
}

// 11 -----------------------------------------------------------------------
Outcome solenoidal_probe() {
  std::string detail;
  bool ok = true;
  for (const MetricSpec& m : {scenes::poincare(), scenes::gaussian()}) {
    ProbeOptions o;
    o.trials = 20;
    o.seed = 111;
    o.threads = g_threads;
    const ProbeReport r = solenoidal_injectivity_probe(m, o);
    ok = ok && r.passed && r.min_ratio > 10.0 * r.noise_floor;
    detail += m.describe() + ": min ratio " + fmt(r.min_ratio) + ", noise floor " + fmt(r.noise_floor) + ", skipped " +
              std::to_string(r.skipped) + "; ";
  }
  return {ok, detail};
}

// 12 -----------------------------------------------------------------------
double shooting_distance(const BoundaryChart& chart, double s, double s_prime) {
  const double target = chart.arc_difference(s, s_prime);
  const double sign = target > 0.0 ? 1.0 : -1.0;
  auto miss = [&](double alpha) {
    return chart.arc_difference(s, scatter_from_boundary(chart, s, sign * alpha).s_out) * sign - std::abs(target);
  };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(miss, 0.3, 0.5 * oracle::kPi - 1e-7,
                                                   boost::math::tools::eps_tolerance<double>(48), iters);
  return scatter_from_boundary(chart, s, sign * 0.5 * (r.first + r.second)).tau;
}

Outcome boundary_distance() {
  double worst = 0.0;
  std::size_t pairs = 0;
  const oracle::CoshClairaut cl(1.0);
  for (const MetricSpec& m : {scenes::flat(), scenes::gaussian(), scenes::poincare(), scenes::cosh_strip()}) {
    const BoundaryChart chart = boundary_chart(m, 512);
    const ScatterTable table = scatter_table(chart, 32, 257, kDefaultTMax, g_threads);
    Rng rng(112);
    for (int k = 0; k < 20; ++k) {
      const double s = rng.uniform(0.0, chart.length());
      const double d = (k % 2 ? 1.0 : -1.0) * rng.uniform(0.02, 0.5);
      const double s2 = chart.advance(s, d);
      const double b = boundary_distance_from_scattering(table, s, s2).distance;
      double exact = 0.0;
      if (m.is_revolution()) {
        exact = cl.boundary_distance(std::abs(d) / std::cosh(1.0));
      } else if (std::holds_alternative<PoincareDisk>(m.base)) {
        exact = oracle::poincare_distance(chart.at(s).x, chart.at(s2).x);
      } else if (std::holds_alternative<GaussianFactor>(std::get<ConformalDisk>(m.base).factor)) {
        exact = shooting_distance(chart, s, s2);
      } else {
        exact = (chart.at(s).x - chart.at(s2).x).norm();
      }
      worst = std::max(worst, std::abs(b - exact));
      ++pairs;
    }
  }
  return {worst < 1e-4, "max error " + fmt(worst) + " over " + std::to_string(pairs) +
                            " near-diagonal pairs on flat, gaussian, Poincare and cosh scenes (< 1e-4)"};
}

// 13 -----------------------------------------------------------------------
Outcome rigidity() {
  const auto start = std::chrono::steady_clock::now();
  const cli::SceneConfig g1 = cli::parse_scene("metric = poincare\nrho0 = 0.8\nextension_margin = 0.12\n");
  const cli::SceneConfig g2 = cli::parse_scene(
      "metric = poincare\nrho0 = 0.8\nextension_margin = 0.12\npullback = twist\npullback.scale = 0.25\n"
      "pullback.twist = 0.4\n");
  cli::RunFlags flags;
  flags.threads = g_threads;
  flags.diffeo = "twist:0.25:0.4";
  flags.log = nullptr;
  cli::OutputDir out(g_out / "rigidity");
  cli::run_rigidity({g1, g2}, flags, out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::map<std::string, double> summary;
  for (const auto& row : read_csv(out.path() / "rigidity_summary.csv")) summary[row.at("quantity")] = std::stod(row.at("value"));
  std::size_t interior = 0;
  for (const auto& row : read_csv(out.path() / "rigidity.csv")) interior += row.at("boundary") == "0" ? 1 : 0;
  const double map_err = summary.at("sup_map_error");
  const double pull = summary.at("sup_pullback_error");
  const double bd = summary.at("sup_boundary_displacement");
  const bool ok = map_err < 1e-2 && pull < 1e-2 && bd < 1e-6 && interior == 400 && secs < 600.0;
  return {ok, "sup map error " + fmt(map_err) + ", sup pullback error " + fmt(pull) + ", boundary displacement " +
                  fmt(bd) + " on " + std::to_string(interior) + " grid points, " + fmt(secs) + " s (< 600 s)"};
}

// 14 -----------------------------------------------------------------------
Outcome determinism() {
  struct Run {
    std::string name;
    std::function<void(const cli::RunFlags&, cli::OutputDir&)> body;
  };
  const auto scene = [](const std::string& text) { return cli::parse_scene(text); };
  const cli::SceneConfig sc = scene("metric = cosh\nscatter.samples = 400\n");
  const cli::SceneConfig kc = scene("metric = conformal\nlambda = gaussian\n");
  const cli::SceneConfig xc = scene("metric = poincare\nxray.field = disk\nxray.boundary_nodes = 24\n");
  const cli::SceneConfig pc = scene("metric = poincare\nxray.field = potential\nxray.boundary_nodes = 16\n");
  const cli::SceneConfig ic =
      scene("metric = flat\nsinj.trials = 3\nsinj.calibration = 2\nsinj.boundary_nodes = 16\nsinj.angle_nodes = 6\n");
  const cli::SceneConfig dc = scene("metric = cosh\ndiagnose.rays = 40\n");
  const std::string small = "rho0 = 0.8\nextension_margin = 0.12\nrigidity.rings = 5\nrigidity.angles = 8\n"
                            "rigidity.boundary_points = 8\nrigidity.layout_depths = 2\nrigidity.layout_arcs = 8\n";
  const cli::SceneConfig r1 = scene("metric = poincare\n" + small);
  const cli::SceneConfig r2 = scene("metric = poincare\npullback = twist\n" + small);
  const std::vector<Run> runs = {
      {"scatter", [&](const cli::RunFlags& f, cli::OutputDir& o) { cli::run_scatter(sc, f, o); }},
      {"kernel", [&](const cli::RunFlags& f, cli::OutputDir& o) { cli::run_kernel(kc, f, o); }},
      {"xray", [&](const cli::RunFlags& f, cli::OutputDir& o) {
         cli::run_xray(xc, f, o);
         cli::OutputDir p(o.path() / "potential");
         cli::run_xray(pc, f, p);
       }},
      {"sinj", [&](const cli::RunFlags& f, cli::OutputDir& o) { cli::run_sinj(ic, f, o); }},
      {"rigidity", [&](const cli::RunFlags& f, cli::OutputDir& o) { cli::run_rigidity({r1, r2}, f, o); }},
      {"diagnose", [&](const cli::RunFlags& f, cli::OutputDir& o) { cli::run_diagnose(dc, f, o); }},
  };
  std::vector<std::string> differing;
  std::size_t files = 0;
  for (const Run& r : runs) {
    std::map<std::string, std::string> first;
    for (std::size_t threads : {std::size_t{1}, std::size_t{1}, std::size_t{3}}) {
      cli::RunFlags flags;
      flags.seed = 114;
      flags.seed_given = true;
      flags.log = nullptr;
      flags.threads = threads;
      const fs::path dir = g_out / "determinism" / (r.name + "_" + std::to_string(threads));
      fs::remove_all(dir);
      cli::OutputDir out(dir);
      r.body(flags, out);
      std::map<std::string, std::string> contents;
      for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        contents[fs::relative(entry.path(), dir).string()] = os.str();
      }
      if (first.empty()) {
        first = contents;
        files += contents.size();
      } else if (contents != first) {
        differing.push_back(r.name + "@" + std::to_string(threads) + " threads");
      }
    }
  }
  std::string detail = std::to_string(files) + " CSV files from 6 subcommands compared across 2 runs at 1 thread and 1 at 3";
  for (const std::string& d : differing) detail += "; differs: " + d;
  return {differing.empty(), detail};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::string out = "acceptance_out";
  g_threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--only", only, "criterion numbers to run (default: all)")->delimiter(',');
  app.add_option("--out", out, "directory for the CSV files of criteria 8, 13 and 14");
  app.add_option("--threads", g_threads, "worker threads");
  CLI11_PARSE(app, argc, argv);
  g_out = out;
  fs::create_directories(g_out);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"flat-disk scattering", flat_scattering},
      {"Poincare-disk scattering", poincare_scattering},
      {"curvature oracles", curvature},
      {"trapped-set hyperbolicity", hyperbolicity},
      {"no conjugate points", conjugate_points},
      {"scattering unitarity", unitarity},
      {"glancing bound", glancing},
      {"kernel asymptotics", kernel_asymptotics},
      {"kernel symmetry", kernel_symmetry},
      {"I2 D annihilation", potential_annihilation},
      {"solenoidal probe", solenoidal_probe},
      {"boundary distance", boundary_distance},
      {"rigidity round trip", rigidity},
      {"determinism", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && selected.count(number) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.passed;
  }
  return all ? 0 : 1;
}

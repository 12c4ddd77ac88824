#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "geoscatter/dynamics/jacobi.hpp"
#include "geoscatter/dynamics/measure.hpp"
#include "geoscatter/errors.hpp"
#include "geoscatter/geometry/checks.hpp"
#include "geoscatter/geometry/collar.hpp"
#include "geoscatter/rigidity/reconstruction.hpp"
#include "geoscatter/support/fit.hpp"
#include "geoscatter/support/parallel.hpp"
#include "geoscatter/support/random.hpp"
#include "geoscatter/transform/normal_operator.hpp"
#include "geoscatter/transform/solenoidal.hpp"
#include "geoscatter/transform/xray.hpp"

namespace geoscatter::cli {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

double t_max_of(const SceneConfig& scene, const RunFlags& flags) {
  return flags.t_max ? *flags.t_max : scene.t_max;
}

std::uint64_t seed_of(const SceneConfig& scene, const RunFlags& flags, const std::string& command) {
  if (flags.seed_given) return flags.seed;
  if (scene.seed) return *scene.seed;
  throw ConfigError(command + " is randomized: pass --seed or set 'seed' in the scene");
}

std::int64_t as_int(bool b) { return b ? 1 : 0; }

std::vector<double> default_separations() {
  std::vector<double> d;
  for (int i = 0; i < 8; ++i) d.push_back(0.02 * std::pow(10.0, i / 7.0));
  return d;
}

} // namespace

int run_scatter(const SceneConfig& scene, const RunFlags& flags, OutputDir& out) {
  const double t_max = t_max_of(scene, flags);
  const BoundaryChart chart = boundary_chart(scene.metric, 512);
  std::vector<std::pair<double, double>> entries;
  if (scene.word("scatter.sampling", "random") == "grid") {
    const std::size_t ns = scene.count("scatter.grid_s", 64);
    const std::size_t na = scene.count("scatter.grid_alpha", 32);
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t k = 0; k < na; ++k) {
        entries.emplace_back(chart.length() * static_cast<double>(i) / static_cast<double>(ns),
                             -kHalfPi + 2.0 * kHalfPi * (static_cast<double>(k) + 0.5) / static_cast<double>(na));
      }
    }
  } else {
    Rng rng(seed_of(scene, flags, "scatter"));
    entries.resize(scene.count("scatter.samples", 1000));
    for (auto& e : entries) {
      e.first = rng.uniform(0.0, chart.length());
      // sin(alpha) uniform: the entries are distributed by mu_nu
      e.second = std::asin(rng.uniform(-1.0, 1.0));
    }
  }
  const std::vector<ScatterCoords> rows = parallel_map(entries.size(), flags.threads, [&](std::size_t i) {
    return scatter_from_boundary(chart, entries[i].first, entries[i].second, t_max, scene.flow);
  });
  CsvTable csv({"s_in", "angle_in", "s_out", "angle_out", "tau", "trapped", "clairaut"});
  std::size_t trapped = 0;
  for (const ScatterCoords& c : rows) {
    trapped += c.trapped ? 1 : 0;
    csv.add(c.s_in).add(c.angle_in).add(c.s_out).add(c.angle_out).add(c.tau).add(as_int(c.trapped)).add(c.clairaut);
    csv.end_row();
  }
  out.write("scatter.csv", csv);
  if (flags.log) *flags.log << "scatter: " << rows.size() << " entries, " << trapped << " trapped\n";
  return 0;
}

int run_kernel(const SceneConfig& scene, const RunFlags& flags, OutputDir& out) {
  const MetricSpec& m = scene.metric;
  const Vec2 x0 = scene.point("kernel.center", Vec2::Zero());
  const double angle = scene.number("kernel.direction", 0.3);
  const std::vector<double> seps = scene.list("kernel.separations", default_separations());
  const double ratio = scene.number("kernel.bandwidth_ratio", 0.125);
  const bool derivative = scene.flag("kernel.derivative", true);
  const double delta_ratio = scene.number("kernel.delta_ratio", 0.05);
  KernelOptions options;
  options.window_nodes = scene.count("kernel.window_nodes", 32);
  options.t_max = t_max_of(scene, flags);
  const Vec2 dir(std::cos(angle), std::sin(angle));

  struct Row {
    KernelEstimate k;
    KernelDerivative d;
  };
  const std::vector<Row> rows = parallel_map(seps.size(), flags.threads, [&](std::size_t i) {
    const Vec2 x = x0 + seps[i] * dir;
    Row r;
    r.k = normal_operator_kernel(m, x, x0, ratio * seps[i], options);
    if (derivative) {
      r.d = normal_operator_kernel_derivative(m, x, x0, dir, delta_ratio * seps[i], ratio * seps[i], options);
    }
    return r;
  });

  CsvTable csv({"x1", "x2", "xp1", "xp2", "separation", "distance", "value", "bandwidth", "err",
                "value_coarse", "value_fine", "jacobi", "derivative", "derivative_err"});
  std::vector<double> dist, val, dval;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const KernelEstimate& k = rows[i].k;
    const double dv = derivative ? rows[i].d.value : std::nan("");
    const double de = derivative ? rows[i].d.err : std::nan("");
    csv.add(k.x[0]).add(k.x[1]).add(k.x_prime[0]).add(k.x_prime[1]).add(seps[i]).add(k.distance)
        .add(k.value).add(k.bandwidth).add(k.err).add(k.value_coarse).add(k.value_fine).add(k.jacobi)
        .add(dv).add(de);
    csv.end_row();
    dist.push_back(k.distance);
    val.push_back(k.value);
    dval.push_back(dv);
  }
  out.write("kernel.csv", csv);

  CsvTable fit({"quantity", "slope", "intercept", "points"});
  if (rows.size() >= 2) {
    const LineFit f = log_log_fit(dist, val);
    fit.add(std::string("value")).add(f.slope).add(f.intercept).add(static_cast<std::int64_t>(f.points));
    fit.end_row();
    if (flags.log) *flags.log << "kernel: log-log slope " << format_double(f.slope) << "\n";
    if (derivative) {
      const LineFit g = log_log_fit(dist, dval);
      fit.add(std::string("derivative")).add(g.slope).add(g.intercept).add(static_cast<std::int64_t>(g.points));
      fit.end_row();
      if (flags.log) *flags.log << "kernel: derivative log-log slope " << format_double(g.slope) << "\n";
    }
  }
  out.write("kernel_fit.csv", fit);
  return 0;
}

int run_xray(const SceneConfig& scene, const RunFlags& flags, OutputDir& out) {
  const MetricSpec& m = scene.metric;
  const double t_max = t_max_of(scene, flags);
  const std::string kind = scene.word("xray.field", "bump");
  const Vec2 c = scene.point("xray.center", Vec2::Zero());
  const double radius = scene.number("xray.radius", 0.5);
  const double amplitude = scene.number("xray.amplitude", 1.0);
  const double width = scene.number("xray.width", 0.2);
  SphereFunction u;
  if (kind == "constant") {
    u = pi0_star(constant_field(amplitude));
  } else if (kind == "bump") {
    u = pi0_star(smooth_bump(c, radius, amplitude));
  } else if (kind == "gaussian") {
    u = pi0_star(gaussian_field(c, width, amplitude));
  } else if (kind == "disk") {
    u = pi0_star(smoothed_disk_indicator(c, radius, width));
  } else {
    if (m.is_revolution()) throw ConfigError("xray.field = potential needs a disk scene");
    BubbleCoefficients coeffs = BubbleCoefficients::Zero();
    coeffs(0, 0) = amplitude;
    coeffs(2, 1) = 0.5 * amplitude;
    coeffs(4, 0) = -0.7 * amplitude;
    u = pi2_star(symmetrized_derivative(m, bubble_one_form(m.boundary_extent(), coeffs)));
  }
  const BoundaryChart chart = boundary_chart(m, 512);
  const std::size_t ns = scene.count("xray.boundary_nodes", 64);
  const std::size_t na = scene.count("xray.angle_nodes", 16);
  struct Row {
    double s, beta, value, tau;
    bool trapped;
  };
  const std::vector<Row> rows = parallel_map(ns * na, flags.threads, [&](std::size_t r) {
    const double s = chart.length() * static_cast<double>(r / na) / static_cast<double>(ns);
    const double beta = -kHalfPi + 2.0 * kHalfPi * (static_cast<double>(r % na) + 0.5) / static_cast<double>(na);
    const BoundaryPoint p = chart.at(s);
    const UnitTangentVector z = make_unit(m, p.x, exit_direction(p, beta));
    try {
      const XrayValue v = xray(m, u, z, t_max, scene.flow);
      return Row{s, beta, v.value, v.tau, false};
    } catch (const TrappedError& e) {
      return Row{s, beta, e.partial_integral(), std::numeric_limits<double>::infinity(), true};
    }
  });
  CsvTable csv({"s", "beta", "value", "tau", "trapped"});
  for (const Row& r : rows) {
    csv.add(r.s).add(r.beta).add(r.value).add(r.tau).add(as_int(r.trapped));
    csv.end_row();
  }
  out.write("xray.csv", csv);
  if (flags.log) *flags.log << "xray: " << rows.size() << " boundary rays\n";
  return 0;
}

int run_sinj(const SceneConfig& scene, const RunFlags& flags, OutputDir& out) {
  ProbeOptions options;
  options.seed = seed_of(scene, flags, "sinj");
  options.trials = scene.count("sinj.trials", 20);
  options.calibration_trials = scene.count("sinj.calibration", 10);
  options.boundary_nodes = scene.count("sinj.boundary_nodes", 48);
  options.angle_nodes = scene.count("sinj.angle_nodes", 16);
  options.solver.degree = static_cast<int>(scene.count("sinj.degree", 10));
  options.t_max = t_max_of(scene, flags);
  options.threads = flags.threads;
  const ProbeReport report = solenoidal_injectivity_probe(scene.metric, options);
  CsvTable csv({"trial", "kind", "tensor_norm", "xray_norm", "ratio", "trapped_measure"});
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const ProbeTrial& t = report.trials[i];
    csv.add(static_cast<std::int64_t>(i)).add(std::string(t.potential ? "potential" : "solenoidal"))
        .add(t.tensor_norm).add(t.xray_norm).add(t.ratio).add(t.trapped_measure);
    csv.end_row();
  }
  out.write("sinj.csv", csv);
  CsvTable summary({"min_ratio", "noise_floor", "skipped", "passed"});
  summary.add(report.min_ratio).add(report.noise_floor).add(static_cast<std::int64_t>(report.skipped))
      .add(as_int(report.passed));
  summary.end_row();
  out.write("sinj_summary.csv", summary);
  if (flags.log) {
    *flags.log << "sinj: min_ratio=" << format_double(report.min_ratio)
               << " noise_floor=" << format_double(report.noise_floor) << (report.passed ? " PASS" : " FAIL")
               << "\n";
  }
  return report.passed ? 0 : 4;
}

int run_rigidity(const std::vector<SceneConfig>& scenes, const RunFlags& flags, OutputDir& out) {
  if (scenes.size() != 2) throw ConfigError("rigidity takes exactly two --scene files");
  const SceneConfig& a = scenes[0];
  ReconstructionOptions options;
  options.eps = a.number("rigidity.eps", options.eps);
  options.rings = a.count("rigidity.rings", options.rings);
  options.angles = a.count("rigidity.angles", options.angles);
  options.fraction = a.number("rigidity.fraction", options.fraction);
  options.layout_depths = a.count("rigidity.layout_depths", options.layout_depths);
  options.layout_arcs = a.count("rigidity.layout_arcs", options.layout_arcs);
  options.boundary_points = a.count("rigidity.boundary_points", options.boundary_points);
  options.embedding.bandwidth = a.number("rigidity.bandwidth", options.embedding.bandwidth);
  options.embedding.window_nodes = a.count("rigidity.window_nodes", options.embedding.window_nodes);
  options.threads = flags.threads;

  std::function<Vec2(const Vec2&)> reference;
  if (!flags.diffeo.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(flags.diffeo);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts[0] == "identity" && parts.size() == 1) {
      reference = [](const Vec2& x) { return x; };
    } else if (parts[0] == "twist" && (parts.size() == 1 || parts.size() == 3)) {
      TwistDiffeo phi{0.25, 0.4, a.metric.boundary_extent()};
      if (parts.size() == 3) {
        try {
          phi.scale = std::stod(parts[1]);
          phi.twist = std::stod(parts[2]);
        } catch (const std::exception&) {
          throw ConfigError("--diffeo twist:SCALE:TWIST expects numbers");
        }
      }
      // g2 = phi^* g1 makes phi an isometry (M, g2) -> (M, g1), so the
      // recovered psi with psi^* g2 = g1 is phi^-1
      reference = [phi](const Vec2& x) { return phi.inverse(x); };
    } else {
      throw ConfigError("unknown --diffeo preset '" + flags.diffeo + "' (identity | twist[:SCALE:TWIST])");
    }
  }
  const ReconstructionReport report = reconstruct_isometry(a.metric, scenes[1].metric, options, reference);
  CsvTable csv({"x1", "x2", "mapped_y1", "mapped_y2", "residual", "pullback_error", "expected_y1",
                "expected_y2", "map_error", "jacobian_det", "boundary", "evaluations"});
  for (const ReconstructedPoint& p : report.points) {
    const Vec2 e = reference ? reference(p.x) : Vec2(std::nan(""), std::nan(""));
    csv.add(p.x[0]).add(p.x[1]).add(p.y[0]).add(p.y[1]).add(p.residual).add(p.pullback_error).add(e[0])
        .add(e[1]).add(p.map_error).add(p.jacobian_det).add(as_int(p.boundary))
        .add(static_cast<std::int64_t>(p.evaluations));
    csv.end_row();
  }
  out.write("rigidity.csv", csv);
  CsvTable summary({"quantity", "value"});
  const auto row = [&](const std::string& q, double v) {
    summary.add(q).add(v);
    summary.end_row();
    if (flags.log) *flags.log << "rigidity: " << q << " = " << format_double(v) << "\n";
  };
  row("sup_map_error", reference ? report.sup_map_error : std::nan(""));
  row("sup_pullback_error", report.sup_pullback_error);
  row("sup_boundary_displacement", report.sup_boundary_displacement);
  row("max_interior_residual", report.max_interior_residual);
  row("max_boundary_residual", report.max_boundary_residual);
  row("min_jacobian_det", report.min_jacobian_det);
  row("embedding_evaluations", static_cast<double>(report.evaluations));
  out.write("rigidity_summary.csv", summary);
  return 0;
}

std::vector<Check> diagnose_checks(const SceneConfig& scene, std::size_t threads) {
  const MetricSpec& m = scene.metric;
  std::vector<Check> checks;
  const auto add = [&](const std::string& name, double value, double threshold, const std::string& note = "") {
    checks.push_back({name, value, threshold, value <= threshold, note});
  };

  // interior sample grid
  std::vector<Vec2> grid;
  const double extent = m.boundary_extent();
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      const double u = -0.95 + 1.9 * i / 63.0, v = -0.95 + 1.9 * j / 63.0;
      if (m.is_revolution()) {
        grid.emplace_back(u * extent, (v + 0.95) / 1.9 * 2.0 * 3.14159265358979323846);
      } else if (u * u + v * v <= 0.95 * 0.95) {
        grid.emplace_back(u * extent, v * extent);
      }
    }
  }
  double inverse_err = 0.0, christoffel_err = 0.0, curvature_err = 0.0, max_k = -1e300;
  for (const Vec2& x : grid) {
    const GeometryJet jet = evaluate_geometry(m, x);
    inverse_err = std::max(inverse_err, (jet.g * jet.g_inv - Mat2::Identity()).cwiseAbs().maxCoeff());
    const auto fd = christoffel_differences(m, x);
    double scale = 1.0, diff = 0.0;
    for (int k = 0; k < 2; ++k) {
      scale = std::max(scale, jet.christoffel[static_cast<std::size_t>(k)].cwiseAbs().maxCoeff());
      diff = std::max(diff, (jet.christoffel[static_cast<std::size_t>(k)] - fd[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff());
    }
    christoffel_err = std::max(christoffel_err, diff / scale);
    curvature_err = std::max(curvature_err, std::abs(jet.curvature - brioschi_curvature(m, x)));
    max_k = std::max(max_k, jet.curvature);
  }
  add("metric_inverse", inverse_err, 1e-12);
  add("christoffel_vs_differences", christoffel_err, 1e-6);
  add("curvature_vs_brioschi", curvature_err, 1e-6);

  const BoundaryChart chart = boundary_chart(m, 512);
  const BoundaryChart fine = boundary_chart(m, 1024);
  double speed_err = 0.0, normal_err = 0.0;
  for (int k = 0; k < 256; ++k) {
    const BoundaryPoint p = chart.at(chart.length() * k / 256.0);
    const Mat2 g = evaluate_geometry(m, p.x).g;
    const double ds = 1e-5;
    const Vec2 fd = chart_difference(m, chart.at(chart.advance(p.s, ds)).x, chart.at(chart.advance(p.s, -ds)).x) / (2.0 * ds);
    speed_err = std::max(speed_err, std::abs(metric_norm(g, fd) - 1.0));
    normal_err = std::max(normal_err, std::abs(metric_dot(g, p.normal, p.tangent)));
  }
  add("boundary_unit_speed", speed_err, 1e-8);
  add("boundary_normal_orthogonal", normal_err, 1e-8);
  add("convexity_stable", std::abs(chart.min_second_ff() - fine.min_second_ff()), 1e-6,
      "min II = " + format_double(chart.min_second_ff()));

  const CollarChart collar = normal_collar(chart, scene.number("collar.eps", 0.1), scene.count("collar.n_r", 8),
                                           scene.count("collar.n_s", 64));
  add("collar_gauss_lemma", collar.max_grr_error + collar.max_grs_error, 1e-7);

  const std::size_t n = scene.count("diagnose.rays", 200);
  const double t_max = scene.t_max;
  struct RayCheck {
    double drift = 0.0, reversal = 0.0, wronskian = 0.0;
    std::size_t conjugate = 0;
    bool trapped = false;
  };
  const std::vector<RayCheck> rays = parallel_map(n, threads, [&](std::size_t i) {
    RayCheck c;
    const double s = chart.length() * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double alpha = 1.4 * (2.0 * std::fmod(0.5 + 0.6180339887498949 * static_cast<double>(i), 1.0) - 1.0);
    const UnitTangentVector z = boundary_entry(chart, s, alpha);
    const ScatterRecord rec = trace_to_boundary(m, z, t_max, scene.flow);
    if (rec.trapped) {
      c.trapped = true;
      return c;
    }
    c.drift = rec.speed_drift / (1.0 + rec.tau);
    const ScatterRecord back = trace_to_boundary(m, reversed(*rec.exit), t_max, scene.flow);
    if (back.exit) {
      c.reversal = std::max(chart_difference(m, back.exit->x, z.x).norm(), (back.exit->v + z.v).norm());
    } else {
      c.reversal = std::numeric_limits<double>::infinity();
    }
    const JacobiPath path = jacobi_transport(m, z, rec.tau, 0.0, 1.0, Region::extension, scene.flow);
    for (const double w : path.wronskian) c.wronskian = std::max(c.wronskian, std::abs(w - path.wronskian.front()));
    c.conjugate = path.zeros.size();
    return c;
  });
  double drift = 0.0, reversal = 0.0, wronskian = 0.0;
  std::size_t conjugate = 0, trapped = 0;
  for (const RayCheck& c : rays) {
    drift = std::max(drift, c.drift);
    reversal = std::max(reversal, c.reversal);
    wronskian = std::max(wronskian, c.wronskian);
    conjugate += c.conjugate;
    trapped += c.trapped ? 1 : 0;
  }
  add("speed_drift_per_time", drift, 1e-9, std::to_string(trapped) + " trapped rays skipped");
  add("flow_reversal", reversal, 1e-7);
  add("jacobi_wronskian", wronskian, 1e-7);
  if (max_k <= 0.0) {
    add("no_conjugate_points", static_cast<double>(conjugate), 0.0);
  } else {
    add("no_conjugate_points", static_cast<double>(conjugate), 0.0, "positive curvature present; informational");
    checks.back().passed = true;
  }
  // near glancing tau ~ 2 |g(v, nu)| / II, so C is bounded by 2 / min II up to
  // the curvature of the boundary along the chord
  const GlancingReport glancing = glancing_escape_bound(chart, 64, std::nullopt, t_max, threads);
  add("glancing_bound_constant", glancing.c_max, 1.1 * 2.0 / chart.min_second_ff(),
      "fitted C = " + format_double(glancing.c_fit));
  return checks;
}

int run_diagnose(const SceneConfig& scene, const RunFlags& flags, OutputDir& out) {
  const std::vector<Check> checks = diagnose_checks(scene, flags.threads);
  CsvTable csv({"property", "value", "threshold", "passed", "note"});
  bool all = true;
  for (const Check& c : checks) {
    csv.add(c.name).add(c.value).add(c.threshold).add(as_int(c.passed)).add(c.note);
    csv.end_row();
    if (flags.log) {
      *flags.log << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << format_double(c.value) << " (threshold "
                 << format_double(c.threshold) << ")" << (c.note.empty() ? "" : " " + c.note) << "\n";
    }
    all = all && c.passed;
  }
  out.write("diagnose.csv", csv);
  return all ? 0 : 4;
}

} // namespace geoscatter::cli

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "geoscatter/errors.hpp"
#include "output.hpp"
#include "scene.hpp"

using namespace geoscatter;
using namespace geoscatter::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geoscatter_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GEOSCATTER_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

int config_error_line(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

} // namespace

TEST_CASE("a minimal flat scene parses with defaults") {
  const SceneConfig s = parse_scene("metric = flat\n");
  CHECK(!s.metric.is_revolution());
  CHECK(s.metric.boundary_extent() == 1.0);
  CHECK(s.t_max == 50.0);
  CHECK(s.flow.rtol == 1e-11);
  CHECK(!s.seed);
  CHECK(s.output == "out");
  CHECK(s.number("kernel.bandwidth_ratio", 0.125) == 0.125);
}

TEST_CASE("scene errors name the key and the line") {
  try {
    parse_scene("metric = flat\n# comment\ncurvatur = 1\n");
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("curvatur") != std::string::npos);
  }
  CHECK(config_error_line("metric = flat\nradius = 1\nradius = 2\n") == 3);
  CHECK(config_error_line("metric = flat\nrtol = -1e-9\n") == 2);
  CHECK(config_error_line("metric = flat\nt_max = soon\n") == 2);
  CHECK(config_error_line("radius = 2\n") >= 0);
  CHECK(config_error_line("metric = flat\nrho0 = 0.5\n") == 2);
  CHECK(config_error_line("metric = flat\nno equals sign\n") == 2);
  CHECK(config_error_line("metric = poincare\nrho0 = 1.5\n") > 0);
}

TEST_CASE("a cosh strip bounded at the waist needs --allow-nonconvex") {
  CHECK_THROWS_AS(parse_scene("metric = cosh\nhalf_width = 0\n"), ConvexityError);
  CHECK_NOTHROW(parse_scene("metric = cosh\nhalf_width = 0\n", true));
}

TEST_CASE("the scene hash ignores key order, spacing and comments") {
  const SceneConfig a = parse_scene("metric = poincare\nrho0 = 0.7\nseed = 4\n");
  const SceneConfig b = parse_scene("# same scene\nseed=4\n\nrho0   =   0.70\nmetric = poincare\n");
  const SceneConfig c = parse_scene("metric = poincare\nrho0 = 0.7\nseed = 5\n");
  CHECK(scene_hash(a) == scene_hash(b));
  CHECK(scene_hash(a) != scene_hash(c));
}

TEST_CASE("every schema key is documented") {
  for (const auto& [key, doc] : scene_schema()) {
    CHECK(!key.empty());
    CHECK(!doc.empty());
  }
}

TEST_CASE("CSV tables round-trip doubles") {
  CsvTable t({"a", "b"});
  t.add(0.1).add(static_cast<std::int64_t>(3));
  t.end_row();
  t.add(1.0 / 3.0).add(std::string("x"));
  t.end_row();
  CHECK(t.str() == "a,b\n0.10000000000000001,3\n0.33333333333333331,x\n");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  t.add(1.0);
  CHECK_THROWS_AS(t.end_row(), std::logic_error);
}

TEST_CASE("run manifests list every emitted file") {
  const fs::path dir = scratch_dir("manifest");
  OutputDir out(dir / "o");
  CsvTable t({"x"});
  t.add(1.0);
  t.end_row();
  out.write("a.csv", t);
  out.write("b.csv", t);
  RunManifest m;
  m.command = "scatter";
  m.scene_hashes = {42};
  m.outputs = out.files();
  write_manifest(out, m);
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
  CHECK(j["command"] == "scatter");
  CHECK(j["outputs"].size() == 2);
  CHECK(j.contains("tool_version"));
  CHECK(j.contains("wall_time_s"));
  for (const auto& f : j["outputs"]) CHECK(fs::exists(dir / "o" / f.get<std::string>()));
}

TEST_CASE("CSV schemas of every subcommand") {
  const fs::path dir = scratch_dir("schemas");
  RunFlags flags;
  flags.seed = 3;
  flags.seed_given = true;
  const auto header = [&](const std::string& file) {
    std::ifstream in(dir / file);
    std::string line;
    std::getline(in, line);
    return line;
  };
  OutputDir out(dir);
  run_scatter(parse_scene("metric = flat\nscatter.samples = 10\n"), flags, out);
  CHECK(header("scatter.csv") == "s_in,angle_in,s_out,angle_out,tau,trapped,clairaut");
  run_kernel(parse_scene("metric = flat\nkernel.separations = 0.05, 0.1\n"), flags, out);
  CHECK(header("kernel.csv") ==
        "x1,x2,xp1,xp2,separation,distance,value,bandwidth,err,value_coarse,value_fine,jacobi,derivative,derivative_err");
  CHECK(header("kernel_fit.csv") == "quantity,slope,intercept,points");
  run_xray(parse_scene("metric = flat\nxray.boundary_nodes = 4\nxray.angle_nodes = 2\n"), flags, out);
  CHECK(header("xray.csv") == "s,beta,value,tau,trapped");
  run_sinj(parse_scene("metric = flat\nsinj.trials = 1\nsinj.calibration = 1\nsinj.boundary_nodes = 12\n"
                       "sinj.angle_nodes = 4\nsinj.degree = 4\n"),
           flags, out);
  CHECK(header("sinj.csv") == "trial,kind,tensor_norm,xray_norm,ratio,trapped_measure");
  CHECK(header("sinj_summary.csv") == "min_ratio,noise_floor,skipped,passed");
  run_diagnose(parse_scene("metric = flat\ndiagnose.rays = 8\n"), flags, out);
  CHECK(header("diagnose.csv") == "property,value,threshold,passed,note");
}

TEST_CASE("diagnose passes on the model scenes") {
  for (const char* text : {"metric = flat\n", "metric = poincare\n", "metric = cosh\n",
                           "metric = conformal\nlambda = gaussian\n"}) {
    for (const Check& c : diagnose_checks(parse_scene(text), 1)) {
      INFO(text << c.name << " = " << c.value);
      CHECK(c.passed);
    }
  }
}

TEST_CASE("command line exit codes and determinism") {
  const fs::path dir = scratch_dir("exit");
  write_text(dir / "flat.scene", "metric = flat\nscatter.samples = 300\n");
  write_text(dir / "bad.scene", "metric = flat\ncurvatur = 1\n");
  write_text(dir / "waist.scene", "metric = cosh\nhalf_width = 0\n");
  const std::string flat = (dir / "flat.scene").string();

  CHECK(run_cli("scatter --scene " + flat + " --out " + (dir / "a").string()) == 2);  // no seed
  CHECK(run_cli("scatter --scene " + (dir / "bad.scene").string() + " --seed 1 --out " + (dir / "b").string()) == 2);
  CHECK(run_cli("scatter --scene " + (dir / "waist.scene").string() + " --seed 1 --out " + (dir / "b").string()) == 3);
  CHECK(run_cli("frobnicate --scene " + flat) == 2);
  CHECK(run_cli("diagnose --scene " + flat + " --out " + (dir / "d").string()) == 0);

  CHECK(run_cli("scatter --scene " + flat + " --seed 9 --out " + (dir / "r1").string()) == 0);
  CHECK(run_cli("scatter --scene " + flat + " --seed 9 --threads 4 --out " + (dir / "r2").string()) == 0);
  CHECK(run_cli("scatter --scene " + flat + " --seed 10 --out " + (dir / "r3").string()) == 0);
  CHECK(slurp(dir / "r1" / "scatter.csv") == slurp(dir / "r2" / "scatter.csv"));
  CHECK(slurp(dir / "r1" / "scatter.csv") != slurp(dir / "r3" / "scatter.csv"));
  CHECK(fs::exists(dir / "r1" / "manifest.json"));
}

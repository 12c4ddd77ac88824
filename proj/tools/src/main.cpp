#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "geoscatter/errors.hpp"

namespace {

using namespace geoscatter;
using namespace geoscatter::cli;

void report(const std::string& kind, const std::string& message, nlohmann::ordered_json extra = {}) {
  nlohmann::ordered_json record;
  record["error"] = kind;
  record["message"] = message;
  for (auto it = extra.begin(); it != extra.end(); ++it) record[it.key()] = it.value();
  std::cerr << record.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesic scattering, X-ray transforms and boundary rigidity"};
  app.set_version_flag("--version", std::string(GEOSCATTER_VERSION));
  app.require_subcommand(1, 1);

  std::vector<std::string> scene_paths;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t threads = 1;
  double t_max = 0.0;
  bool allow_nonconvex = false;
  std::string diffeo;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"scatter", "trace boundary entries and write the scattering relation"},
      {"kernel", "estimate the normal operator kernel along a ray of separations"},
      {"xray", "X-ray transform of a preset field on the outgoing boundary"},
      {"sinj", "solenoidal injectivity probe for symmetric 2-tensors"},
      {"rigidity", "reconstruct the isometry between two scenes"},
      {"diagnose", "run the geometry and dynamics invariant suite"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scene", scene_paths, "scene file (twice for rigidity)")->required();
    sub->add_option("--seed", seed, "seed of randomized commands");
    sub->add_option("--out", out_dir, "output directory (default: scene 'output' key)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--t-max", t_max, "trapping cutoff time")->check(CLI::PositiveNumber);
    sub->add_flag("--allow-nonconvex", allow_nonconvex, "accept scenes whose boundary is not strictly convex");
    if (name == "rigidity") {
      sub->add_option("--diffeo", diffeo, "reference map: identity | twist[:SCALE:TWIST]");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report("usage", e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  RunFlags flags;
  flags.threads = threads;
  flags.seed = seed;
  flags.seed_given = sub->count("--seed") > 0;
  if (sub->count("--t-max") > 0) flags.t_max = t_max;
  flags.diffeo = diffeo;

  const auto start = std::chrono::steady_clock::now();
  try {
    std::vector<SceneConfig> scenes;
    for (const std::string& p : scene_paths) scenes.push_back(load_scene(p, allow_nonconvex));
    if (command != "rigidity" && scenes.size() != 1) throw ConfigError(command + " takes exactly one --scene");
    OutputDir out(out_dir.empty() ? scenes.front().output : out_dir);

    int code = 0;
    if (command == "scatter") code = run_scatter(scenes.front(), flags, out);
    else if (command == "kernel") code = run_kernel(scenes.front(), flags, out);
    else if (command == "xray") code = run_xray(scenes.front(), flags, out);
    else if (command == "sinj") code = run_sinj(scenes.front(), flags, out);
    else if (command == "rigidity") code = run_rigidity(scenes, flags, out);
    else code = run_diagnose(scenes.front(), flags, out);

    RunManifest manifest;
    manifest.command = command;
    for (const SceneConfig& s : scenes) manifest.scene_hashes.push_back(scene_hash(s));
    manifest.seed = flags.seed_given ? flags.seed : scenes.front().seed.value_or(0);
    manifest.threads = flags.threads;
    manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.outputs = out.files();
    write_manifest(out, manifest);
    return code;
  } catch (const ConfigError& e) {
    nlohmann::ordered_json extra;
    if (e.line() > 0) extra["line"] = e.line();
    report(e.kind(), e.what(), extra);
    return 2;
  } catch (const PropertyFailure& e) {
    report(e.kind(), e.what(), {{"witness", e.witness()}});
    return 4;
  } catch (const ConvexityError& e) {
    report(e.kind(), e.what(), {{"s", e.arclength()}, {"second_ff", e.second_ff()}});
    return 3;
  } catch (const SolverError& e) {
    report(e.kind(), e.what(), {{"residual_history", e.residual_history()}});
    return 3;
  } catch (const NumericalError& e) {
    report(e.kind(), e.what());
    return 3;
  } catch (const std::exception& e) {
    report("internal", e.what());
    return 3;
  }
}

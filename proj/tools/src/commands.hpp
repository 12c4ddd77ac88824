#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "output.hpp"
#include "scene.hpp"

namespace geoscatter::cli {

struct RunFlags {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 1;
  std::optional<double> t_max;
  /// rigidity: expected map preset, "identity" or "twist[:scale:twist]".
  std::string diffeo;
  /// Human-readable summaries; null silences them.
  std::ostream* log = &std::cout;
};

/// One property checked by diagnose.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string note;
};

/// Each command writes its CSV files into `out` and returns the process
/// exit code (0, or 4 when a checked property fails).
int run_scatter(const SceneConfig& scene, const RunFlags& flags, OutputDir& out);
int run_kernel(const SceneConfig& scene, const RunFlags& flags, OutputDir& out);
int run_xray(const SceneConfig& scene, const RunFlags& flags, OutputDir& out);
int run_sinj(const SceneConfig& scene, const RunFlags& flags, OutputDir& out);
int run_rigidity(const std::vector<SceneConfig>& scenes, const RunFlags& flags, OutputDir& out);
int run_diagnose(const SceneConfig& scene, const RunFlags& flags, OutputDir& out);

/// The geometry and dynamics invariant suite behind `diagnose`.
std::vector<Check> diagnose_checks(const SceneConfig& scene, std::size_t threads);

} // namespace geoscatter::cli

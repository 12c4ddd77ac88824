#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoscatter/dynamics/scattering.hpp"

namespace geoscatter::cli {

/// A parsed scene file: `key = value` lines, `#` comments. Every key is
/// validated against the schema and stored with its normalized value.
struct SceneConfig {
  std::string source;
  MetricSpec metric;
  double t_max = kDefaultTMax;
  FlowOptions flow;
  std::optional<std::uint64_t> seed;
  std::string output = "out";
  /// Normalized values of the keys present in the file.
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string word(const std::string& key, const std::string& fallback) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
  Vec2 point(const std::string& key, const Vec2& fallback) const;
};

/// Throws ConfigError with the line number of the first offending line:
/// malformed lines, unknown or repeated keys, values of the wrong type,
/// non-positive tolerances and missing required keys. A scene whose
/// boundary is not strictly convex raises ConvexityError unless
/// allow_nonconvex is set.
SceneConfig parse_scene(const std::string& text, bool allow_nonconvex = false,
                        const std::string& source = "<scene>");
SceneConfig load_scene(const std::string& path, bool allow_nonconvex = false);

/// FNV-1a over the sorted (key, normalized value) pairs: independent of
/// key order, comments and spacing.
std::uint64_t scene_hash(const SceneConfig& scene);

/// Names and one-line descriptions of every accepted key.
const std::vector<std::pair<std::string, std::string>>& scene_schema();

} // namespace geoscatter::cli

#include "scene.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "geoscatter/errors.hpp"
#include "geoscatter/support/hash.hpp"

namespace geoscatter::cli {

namespace {

enum class Kind { number, positive, count, boolean, word, list, point, seed };

struct Key {
  std::string name;
  Kind kind;
  std::string help;
  std::vector<std::string> words = {};
};

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"metric", Kind::word, "flat | conformal | poincare | cosh", {"flat", "conformal", "poincare", "cosh"}},
      {"radius", Kind::positive, "boundary radius of flat and conformal disks (default 1)"},
      {"lambda", Kind::word, "conformal factor: zero | gaussian (default zero)", {"zero", "gaussian"}},
      {"lambda.amplitude", Kind::number, "gaussian factor amplitude (default 0.3)"},
      {"lambda.width", Kind::positive, "gaussian factor width (default 0.5)"},
      {"lambda.center", Kind::point, "gaussian factor center (default 0, 0)"},
      {"rho0", Kind::positive, "poincare truncation radius (default 0.8)"},
      {"half_width", Kind::number, "cosh cylinder boundary at r = +-half_width (default 1)"},
      {"extension_margin", Kind::positive, "width of the extension beyond the boundary (default 0.1)"},
      {"pullback", Kind::word, "none | twist: metric pulled back by the boundary-fixing twist", {"none", "twist"}},
      {"pullback.scale", Kind::number, "twist radial scale (default 0.25)"},
      {"pullback.twist", Kind::number, "twist rotation rate (default 0.4)"},
      {"t_max", Kind::positive, "trapping cutoff time (default 50)"},
      {"rtol", Kind::positive, "integrator relative tolerance (default 1e-11)"},
      {"atol", Kind::positive, "integrator absolute tolerance (default 1e-13)"},
      {"seed", Kind::seed, "seed of randomized commands"},
      {"output", Kind::word, "output directory (default out)"},
      {"scatter.sampling", Kind::word, "random | grid entry sampling (default random)", {"random", "grid"}},
      {"scatter.samples", Kind::count, "random entries traced by scatter (default 1000)"},
      {"scatter.grid_s", Kind::count, "grid sampling: boundary points (default 64)"},
      {"scatter.grid_alpha", Kind::count, "grid sampling: entry angles per point (default 32)"},
      {"kernel.center", Kind::point, "base point x0 (default 0, 0)"},
      {"kernel.direction", Kind::number, "chart angle of the offsets x - x0 (default 0.3)"},
      {"kernel.separations", Kind::list, "chart offsets |x - x0| (default 8 log-spaced in [0.02, 0.2])"},
      {"kernel.bandwidth_ratio", Kind::positive, "mollifier radius / separation (default 0.125)"},
      {"kernel.window_nodes", Kind::count, "angular window nodes (default 32)"},
      {"kernel.derivative", Kind::boolean, "also estimate the transversal derivative (default true)"},
      {"kernel.delta_ratio", Kind::positive, "derivative step / separation (default 0.05)"},
      {"xray.field", Kind::word, "constant | bump | gaussian | disk | potential", {"constant", "bump", "gaussian", "disk", "potential"}},
      {"xray.center", Kind::point, "field center (default 0, 0)"},
      {"xray.radius", Kind::positive, "bump or disk radius (default 0.5)"},
      {"xray.amplitude", Kind::number, "field amplitude (default 1)"},
      {"xray.width", Kind::positive, "gaussian width or disk edge (default 0.2)"},
      {"xray.boundary_nodes", Kind::count, "outgoing boundary points (default 64)"},
      {"xray.angle_nodes", Kind::count, "exit angles per boundary point (default 16)"},
      {"sinj.trials", Kind::count, "random solenoidal tensors (default 20)"},
      {"sinj.calibration", Kind::count, "potential tensors for the noise floor (default 10)"},
      {"sinj.degree", Kind::count, "basis degree of the decomposition (default 10)"},
      {"sinj.boundary_nodes", Kind::count, "boundary points of the X-ray norm (default 48)"},
      {"sinj.angle_nodes", Kind::count, "exit angles of the X-ray norm (default 16)"},
      {"rigidity.eps", Kind::positive, "outer collar width (default 0.6)"},
      {"rigidity.rings", Kind::count, "interior grid rings (default 20)"},
      {"rigidity.angles", Kind::count, "interior grid angles (default 20)"},
      {"rigidity.fraction", Kind::positive, "outer grid ring / boundary radius (default 0.9)"},
      {"rigidity.layout_depths", Kind::count, "collar node depths (default 6)"},
      {"rigidity.layout_arcs", Kind::count, "collar node arcs (default 24)"},
      {"rigidity.boundary_points", Kind::count, "pinned boundary points (default 24)"},
      {"rigidity.bandwidth", Kind::positive, "mollifier radius at the collar nodes (default 0.005)"},
      {"rigidity.window_nodes", Kind::count, "kernel window nodes (default 32)"},
      {"collar.eps", Kind::positive, "inner collar width checked by diagnose (default 0.1)"},
      {"collar.n_r", Kind::count, "collar depths checked by diagnose (default 8)"},
      {"collar.n_s", Kind::count, "collar arcs checked by diagnose (default 64)"},
      {"diagnose.rays", Kind::count, "rays traced by diagnose (default 200)"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text, const std::string& key, int line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "' expects a number, got '" + t + "'", line);
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& key, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, key, line));
  return out;
}

std::string normalize(const Key& key, const std::string& raw, int line) {
  switch (key.kind) {
    case Kind::number:
      return format_number(parse_number(raw, key.name, line));
    case Kind::positive: {
      const double v = parse_number(raw, key.name, line);
      if (!(v > 0.0)) throw ConfigError("key '" + key.name + "' must be positive", line);
      return format_number(v);
    }
    case Kind::count:
    case Kind::seed: {
      std::uint64_t v = 0;
      const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (raw.empty() || res.ec != std::errc() || res.ptr != raw.data() + raw.size()) {
        throw ConfigError("key '" + key.name + "' expects a non-negative integer, got '" + raw + "'", line);
      }
      if (key.kind == Kind::count && v == 0) {
        throw ConfigError("key '" + key.name + "' must be positive", line);
      }
      return std::to_string(v);
    }
    case Kind::boolean:
      if (raw == "true" || raw == "1" || raw == "yes") return "true";
      if (raw == "false" || raw == "0" || raw == "no") return "false";
      throw ConfigError("key '" + key.name + "' expects true or false", line);
    case Kind::word:
      if (!key.words.empty() && std::find(key.words.begin(), key.words.end(), raw) == key.words.end()) {
        std::string allowed;
        for (const auto& w : key.words) allowed += (allowed.empty() ? "" : " | ") + w;
        throw ConfigError("key '" + key.name + "' expects one of " + allowed + ", got '" + raw + "'", line);
      }
      if (raw.empty()) throw ConfigError("key '" + key.name + "' is empty", line);
      return raw;
    case Kind::list:
    case Kind::point: {
      const std::vector<double> v = parse_list(raw, key.name, line);
      if (key.kind == Kind::point && v.size() != 2) {
        throw ConfigError("key '" + key.name + "' expects two comma-separated numbers", line);
      }
      if (v.empty()) throw ConfigError("key '" + key.name + "' is empty", line);
      std::string out;
      for (const double x : v) out += (out.empty() ? "" : ",") + format_number(x);
      return out;
    }
  }
  return raw;
}

} // namespace

double SceneConfig::number(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : std::stod(it->second);
}

std::size_t SceneConfig::count(const std::string& key, std::size_t fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : static_cast<std::size_t>(std::stoull(it->second));
}

bool SceneConfig::flag(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second == "true";
}

std::string SceneConfig::word(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::vector<double> SceneConfig::list(const std::string& key, std::vector<double> fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

Vec2 SceneConfig::point(const std::string& key, const Vec2& fallback) const {
  const std::vector<double> v = list(key, {fallback[0], fallback[1]});
  return {v[0], v[1]};
}

SceneConfig parse_scene(const std::string& text, bool allow_nonconvex, const std::string& source) {
  SceneConfig scene;
  scene.source = source;
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(raw.substr(0, raw.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string name = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& k) { return k.name == name; });
    if (it == keys().end()) throw ConfigError("unknown key '" + name + "'", line);
    if (lines.count(name) != 0) {
      throw ConfigError("key '" + name + "' repeats line " + std::to_string(lines[name]), line);
    }
    lines[name] = line;
    scene.values[name] = normalize(*it, value, line);
  }
  if (!scene.has("metric")) throw ConfigError("missing required key 'metric'", line + 1);

  const auto at = [&](const std::string& key) { return lines.count(key) != 0 ? lines[key] : 0; };
  const std::string kind = scene.word("metric", "");
  const auto reject = [&](const std::string& key, const std::string& why) {
    if (scene.has(key)) throw ConfigError("key '" + key + "' " + why, at(key));
  };
  MetricSpec& m = scene.metric;
  m.extension_margin = scene.number("extension_margin", 0.1);
  if (kind == "flat" || kind == "conformal") {
    ConformalDisk disk;
    disk.radius = scene.number("radius", 1.0);
    const std::string lambda = scene.word("lambda", kind == "flat" ? "zero" : "gaussian");
    if (kind == "flat" && lambda != "zero") throw ConfigError("flat scenes take lambda = zero", at("lambda"));
    if (lambda == "gaussian") {
      disk.factor = GaussianFactor{scene.number("lambda.amplitude", 0.3), scene.number("lambda.width", 0.5),
                                   scene.point("lambda.center", Vec2::Zero())};
    } else {
      for (const char* k : {"lambda.amplitude", "lambda.width", "lambda.center"}) reject(k, "needs lambda = gaussian");
    }
    m.base = disk;
    for (const char* k : {"rho0", "half_width"}) reject(k, "does not apply to " + kind + " scenes");
  } else if (kind == "poincare") {
    m.base = PoincareDisk{scene.number("rho0", 0.8)};
    for (const char* k : {"radius", "lambda", "lambda.amplitude", "lambda.width", "lambda.center", "half_width"}) {
      reject(k, "does not apply to poincare scenes");
    }
  } else {
    m.base = RevolutionStrip{Profile::cosh, scene.number("half_width", 1.0)};
    for (const char* k : {"radius", "lambda", "lambda.amplitude", "lambda.width", "lambda.center", "rho0"}) {
      reject(k, "does not apply to cosh scenes");
    }
  }
  if (scene.word("pullback", "none") == "twist") {
    m.pullback = TwistDiffeo{scene.number("pullback.scale", 0.25), scene.number("pullback.twist", 0.4),
                             m.boundary_extent()};
  } else {
    for (const char* k : {"pullback.scale", "pullback.twist"}) reject(k, "needs pullback = twist");
  }
  try {
    validate(m);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), at("metric"));
  }
  if (!allow_nonconvex) boundary_chart(m, 256);

  scene.t_max = scene.number("t_max", kDefaultTMax);
  scene.flow.rtol = scene.number("rtol", scene.flow.rtol);
  scene.flow.atol = scene.number("atol", scene.flow.atol);
  if (scene.has("seed")) scene.seed = std::stoull(scene.values["seed"]);
  scene.output = scene.word("output", "out");
  return scene;
}

SceneConfig load_scene(const std::string& path, bool allow_nonconvex) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scene file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), allow_nonconvex, path);
}

std::uint64_t scene_hash(const SceneConfig& scene) {
  Fnv1a h;
  for (const auto& [key, value] : scene.values) {
    h.text(key + '=' + value + '\n');
  }
  return h.value();
}

const std::vector<std::pair<std::string, std::string>>& scene_schema() {
  static const std::vector<std::pair<std::string, std::string>> out = [] {
    std::vector<std::pair<std::string, std::string>> v;
    for (const Key& k : keys()) v.emplace_back(k.name, k.help);
    return v;
  }();
  return out;
}

} // namespace geoscatter::cli

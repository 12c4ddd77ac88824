#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "geoscatter/errors.hpp"

namespace geoscatter::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  for (std::size_t i = 0; i < columns_.size(); ++i) body_ += (i ? "," : "") + columns_[i];
  body_ += '\n';
}

CsvTable& CsvTable::add(double value) {
  cells_.push_back(format_double(value));
  return *this;
}

CsvTable& CsvTable::add(std::int64_t value) {
  cells_.push_back(std::to_string(value));
  return *this;
}

CsvTable& CsvTable::add(const std::string& value) {
  cells_.push_back(value);
  return *this;
}

void CsvTable::end_row() {
  if (cells_.size() != columns_.size()) {
    throw std::logic_error("csv row has " + std::to_string(cells_.size()) + " cells for " +
                           std::to_string(columns_.size()) + " columns");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) body_ += (i ? "," : "") + cells_[i];
  body_ += '\n';
  cells_.clear();
}

std::string CsvTable::str() const { return body_; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw ConfigError("cannot write '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& content) {
  write_atomic(dir_ / name, content);
  files_.push_back(name);
}

void write_manifest(const OutputDir& out, const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  std::vector<std::string> hashes;
  for (const std::uint64_t h : manifest.scene_hashes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    hashes.emplace_back(buf);
  }
  j["scene_hashes"] = hashes;
  j["seed"] = manifest.seed;
  j["threads"] = manifest.threads;
  j["tool_version"] = GEOSCATTER_VERSION;
  j["wall_time_s"] = manifest.wall_time;
  j["outputs"] = manifest.outputs;
  write_atomic(out.path() / "manifest.json", j.dump(2) + "\n");
}

} // namespace geoscatter::cli

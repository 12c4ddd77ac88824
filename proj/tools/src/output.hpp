#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace geoscatter::cli {

/// CSV with a header row, '.' decimal point and 17 significant digits.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  CsvTable& add(double value);
  CsvTable& add(std::int64_t value);
  CsvTable& add(const std::string& value);
  /// Throws std::logic_error when the row does not match the header.
  void end_row();

  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> cells_;
  std::string body_;
};

std::string format_double(double value);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Collects the files written by one command run.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  void write(const std::string& name, const CsvTable& table) { write(name, table.str()); }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

struct RunManifest {
  std::string command;
  std::vector<std::uint64_t> scene_hashes;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double wall_time = 0.0;
  std::vector<std::string> outputs;
};

/// manifest.json, written atomically after the outputs.
void write_manifest(const OutputDir& out, const RunManifest& manifest);

} // namespace geoscatter::cli

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "solstab/common.hpp"

namespace solstab {

// CSV artifact: header row, then rows of 17-significant-digit floats.
// Deterministic: identical inputs produce byte-identical bodies.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

std::string format_g17(double v);

// Flat key = value config with [section] headers. Keys inside a section are
// exposed as "section.key"; lookups fall back from "section.key" to "key".
class Config {
 public:
  Config() = default;
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Scoped lookup: section.key if present, else bare key, else fallback.
  std::string get_scoped(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  const std::map<std::string, std::string>& entries() const {
    return values_;
  }

 private:
  std::map<std::string, std::string> values_;
};

// FNV-1a 64-bit content hash, hex encoded; used for config hashes in run
// manifests.
std::string fnv1a_hex(const std::string& data);

// Reads a whole file; parameter_error if it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

// Static slice-parallel loop over [0, n); runs inline when nthreads == 1.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace solstab

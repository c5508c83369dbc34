#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psd/pulse.hpp"

namespace psd {

/// Pulse CSV: one pulse per row, comma-separated reals. A first row whose
/// first cell is not numeric is treated as a header and skipped.
/// Labels: one token per line (n/g/neutron/gamma, case-insensitive).
Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<std::filesystem::path>& label_path = std::nullopt,
                     double dt = 1.0);
std::vector<Label> load_labels(const std::filesystem::path& path);

/// Shortest round-trip formatting, so save -> load is bit-identical.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
void save_labels(const std::vector<Label>& labels, const std::filesystem::path& path);

/// "pulse_id,factor" rows with a header line.
void save_factors(const FactorSeries& series, const Dataset& ds, const std::filesystem::path& path);
FactorSeries load_factors(const std::filesystem::path& path);

std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);

/// Plain-text key=value configuration. `[section]` lines prefix the following
/// keys as "section.key"; '#' and ';' start comments.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse(std::string_view text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  /// Keys beginning with "prefix.", with the prefix stripped.
  KeyValueConfig section(const std::string& prefix) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace psd

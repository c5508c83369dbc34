#include "psd/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "psd/error.hpp"

namespace psd {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    cells.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<Label> load_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Label> labels;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    // Also accept a single comma-separated line ("n,g,n").
    for (auto cell : split(t, ',')) {
      if (!cell.empty()) labels.push_back(parse_label(cell));
    }
  }
  return labels;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<std::filesystem::path>& label_path, double dt) {
  auto in = open_input(path);
  Dataset ds;
  ds.source = path.string();
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (ds.pulses.empty() && width < 0 && !parse_double(cells.front())) {
      width = 0;  // header row, skipped
      continue;
    }
    Pulse p;
    p.dt = dt;
    p.id = static_cast<std::int64_t>(ds.pulses.size());
    p.samples.resize(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto v = parse_double(cells[i]);
      if (!v) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                        std::string(cells[i]) + "'");
      }
      p.samples[static_cast<Eigen::Index>(i)] = *v;
    }
    if (!ds.pulses.empty() && p.size() != ds.pulses.front().size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": ragged row of " +
                      std::to_string(p.size()) + " samples, expected " +
                      std::to_string(ds.pulses.front().size()));
    }
    ds.pulses.push_back(std::move(p));
  }
  if (label_path) {
    auto labels = load_labels(*label_path);
    if (labels.size() != ds.pulses.size()) {
      throw DataError("label file has " + std::to_string(labels.size()) + " labels for " +
                      std::to_string(ds.pulses.size()) + " pulses");
    }
    ds.labels = std::move(labels);
  }
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  auto out = open_output(path);
  std::string row;
  for (const auto& p : ds.pulses) {
    row.clear();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (i) row.push_back(',');
      row += format_double(p.samples[i]);
    }
    row.push_back('\n');
    out << row;
  }
}

void save_labels(const std::vector<Label>& labels, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (Label l : labels) out << label_name(l) << '\n';
}

void save_factors(const FactorSeries& series, const Dataset& ds,
                  const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "pulse_id," << series.method << '\n';
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    const auto id = static_cast<std::size_t>(i) < ds.pulses.size()
                        ? ds.pulses[static_cast<std::size_t>(i)].id
                        : static_cast<std::int64_t>(i);
    out << id << ',' << (std::isfinite(series.values[i]) ? format_double(series.values[i]) : "nan")
        << '\n';
  }
}

FactorSeries load_factors(const std::filesystem::path& path) {
  auto in = open_input(path);
  FactorSeries fs;
  std::string line;
  std::vector<double> values;
  bool header = true;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (cells.size() != 2) throw DataError(path.string() + ": expected 'pulse_id,factor' rows");
    if (header) {
      header = false;
      if (!parse_double(cells[0])) {
        fs.method = std::string(cells[1]);
        continue;
      }
    }
    if (cells[1] == "nan") {
      values.push_back(std::numeric_limits<double>::quiet_NaN());
    } else if (auto v = parse_double(cells[1])) {
      values.push_back(*v);
    } else {
      throw DataError(path.string() + ": non-numeric factor '" + std::string(cells[1]) + "'");
    }
  }
  if (fs.method.empty()) fs.method = path.stem().string();
  fs.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return fs;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) {
      line = line.substr(0, c);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    cfg.values_[full] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto s = get(key);
  if (!s) return fallback;
  const auto v = parse_double(*s);
  if (!v) throw ConfigError(origin_ + ": key '" + key + "' expects a number, got '" + *s + "'");
  return *v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  const auto s = get(key);
  if (!s) return fallback;
  long long v = 0;
  const auto t = trim(*s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(origin_ + ": key '" + key + "' expects an integer, got '" + *s + "'");
  }
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto s = get(key);
  if (!s) return fallback;
  std::string t(*s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(origin_ + ": key '" + key + "' expects a boolean, got '" + *s + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                const std::vector<double>& fallback) const {
  const auto s = get(key);
  if (!s) return fallback;
  std::vector<double> out;
  for (auto cell : split(*s, ',')) {
    if (cell.empty()) continue;
    const auto v = parse_double(cell);
    if (!v) throw ConfigError(origin_ + ": key '" + key + "' has non-numeric entry '" +
                              std::string(cell) + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const {
  const auto s = get(key);
  if (!s) return fallback;
  std::vector<std::string> out;
  for (auto cell : split(*s, ',')) {
    if (!cell.empty()) out.emplace_back(cell);
  }
  return out;
}

KeyValueConfig KeyValueConfig::section(const std::string& prefix) const {
  KeyValueConfig out;
  out.origin_ = origin_;
  const std::string p = prefix + ".";
  for (const auto& [k, v] : values_) {
    if (k.rfind(p, 0) == 0) out.values_[k.substr(p.size())] = v;
  }
  return out;
}

}  // namespace psd

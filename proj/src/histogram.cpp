#include "psd/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psd/error.hpp"

namespace psd {
namespace {

std::vector<double> finite_sorted(const Eigen::VectorXd& values) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(values.size()));
  for (double v : values) {
    if (std::isfinite(v)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

constexpr std::size_t kMinBins = 50;
constexpr std::size_t kMaxBins = 500;

}  // namespace

long long Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0LL); }

std::size_t Histogram::non_empty() const {
  return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](long long c) { return c > 0; }));
}

std::size_t auto_bin_count(const Eigen::VectorXd& values) {
  const std::vector<double> s = finite_sorted(values);
  if (s.size() < 2) return kMinBins;
  const double range = s.back() - s.front();
  const double iqr = quantile(s, 0.75) - quantile(s, 0.25);
  if (!(iqr > 0) || !(range > 0)) return kMinBins;
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(s.size()));
  const double bins = std::ceil(range / width);
  return std::clamp(static_cast<std::size_t>(bins), kMinBins, kMaxBins);
}

Histogram make_histogram(const Eigen::VectorXd& values, std::optional<std::size_t> bins) {
  const std::vector<double> s = finite_sorted(values);
  if (s.size() < 2) throw DataError("histogram needs at least two finite values");
  const double lo = s.front(), hi = s.back();
  if (!(hi > lo)) throw DataError("histogram of identical values (zero range)");
  const std::size_t n = bins ? *bins : auto_bin_count(values);
  if (n == 0) throw ConfigError("histogram needs at least one bin");

  Histogram h;
  h.edges.resize(n + 1);
  const double width = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges[n] = hi;
  h.counts.assign(n, 0);
  for (double v : s) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= n) idx = n - 1;
    // Guard the floating-point division against landing one bin off.
    while (idx > 0 && v < h.edges[idx]) --idx;
    while (idx + 1 < n && v >= h.edges[idx + 1]) ++idx;
    ++h.counts[idx];
  }
  return h;
}

}  // namespace psd

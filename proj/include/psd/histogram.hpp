#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace psd {

/// Equal-width bins; the last bin is closed on the right so the maximum is
/// counted.
struct Histogram {
  std::vector<double> edges;
  std::vector<long long> counts;

  std::size_t bins() const { return counts.size(); }
  double bin_width() const { return edges[1] - edges[0]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  long long total() const;
  std::size_t non_empty() const;
};

/// Freedman-Diaconis bin count clamped to [50, 500].
std::size_t auto_bin_count(const Eigen::VectorXd& values);

/// Non-finite values are skipped. Throws DataError with fewer than two finite
/// values or a zero range.
Histogram make_histogram(const Eigen::VectorXd& values, std::optional<std::size_t> bins = std::nullopt);

}  // namespace psd

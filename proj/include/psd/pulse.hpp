#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace psd {

enum class Label : std::uint8_t { Gamma = 0, Neutron = 1 };

/// Accepts n/g/neutron/gamma, case-insensitive. Throws DataError otherwise.
Label parse_label(std::string_view token);
std::string_view label_name(Label label);
inline double label_value(Label label) { return label == Label::Neutron ? 1.0 : 0.0; }

/// One digitized waveform. Sample index t is 0-based; dt is the sample period.
struct Pulse {
  Eigen::VectorXd samples;
  double dt = 1.0;
  std::int64_t id = 0;

  Eigen::Index size() const { return samples.size(); }
  double sample_rate() const { return 1.0 / dt; }

  /// Throws DataError on an empty or non-finite waveform or dt <= 0.
  void validate() const;
};

/// Per-pulse discrimination factors of one method, aligned to Dataset order.
/// Pulses where the method was undefined hold NaN.
struct FactorSeries {
  std::string method;
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
  Eigen::Index invalid_count() const;
  /// Finite entries only, order preserved.
  Eigen::VectorXd finite_values() const;
};

struct Dataset {
  std::vector<Pulse> pulses;
  std::optional<std::vector<Label>> labels;
  std::string source;

  std::size_t size() const { return pulses.size(); }
  bool empty() const { return pulses.empty(); }
  bool labeled() const { return labels.has_value(); }
  /// Common pulse length, 0 for an empty dataset.
  Eigen::Index length() const { return pulses.empty() ? 0 : pulses.front().size(); }

  /// Equal lengths, finite samples, labels aligned. Throws DataError.
  void validate() const;

  /// Pulses (and labels) at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Rows are pulses.
  Eigen::MatrixXd matrix() const;

  std::size_t count(Label label) const;
};

}  // namespace psd

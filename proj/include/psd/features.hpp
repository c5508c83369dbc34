#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "psd/pulse.hpp"

namespace psd {

enum class FeatureKind {
  Raw,               ///< samples verbatim
  FftMag,            ///< |one-sided DFT|, N/2 + 1 values
  StftMag,           ///< flattened |STFT| frames, Hann window, zero-padded tail
  DwtHaar,           ///< level-1 Haar approximation then detail coefficients
  Pca,               ///< projection onto the top-k principal axes of `pca_source`
  SegmentSums,       ///< sums over `segments` equal slices of the pulse
  CumulativeCharge,  ///< cumulative sums at `truncation_points` equally spaced cuts
};

std::string_view feature_kind_name(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view name);

struct PcaBasis {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  ///< dim x k, orthonormal columns, descending variance
};

struct FeatureSpec {
  FeatureKind kind = FeatureKind::Raw;
  FeatureKind pca_source = FeatureKind::Raw;
  Eigen::Index stft_window = 32;
  Eigen::Index stft_hop = 16;
  Eigen::Index pca_components = 100;
  Eigen::Index segments = 16;
  Eigen::Index truncation_points = 6;
  std::optional<PcaBasis> pca;

  void validate() const;
};

/// Fits the PCA basis when the spec needs one; other kinds pass through.
FeatureSpec fit_features(FeatureSpec spec, const Dataset& training);
Eigen::VectorXd extract_features(const FeatureSpec& spec, const Eigen::VectorXd& pulse);
/// Rows are pulses.
Eigen::MatrixXd extract_features(const FeatureSpec& spec, const Dataset& ds);

// Individual transforms, exposed for testing.
Eigen::VectorXd fft_magnitude(const Eigen::VectorXd& v);
Eigen::VectorXd stft_magnitude(const Eigen::VectorXd& v, Eigen::Index window, Eigen::Index hop);
Eigen::VectorXd dwt_haar(const Eigen::VectorXd& v);
Eigen::VectorXd segment_sums(const Eigen::VectorXd& v, Eigen::Index segments);
Eigen::VectorXd cumulative_charge(const Eigen::VectorXd& v, Eigen::Index points);
PcaBasis fit_pca_basis(const Eigen::MatrixXd& rows, Eigen::Index k);

/// Per-column zero mean / unit variance, fitted on training rows. Constant
/// columns get scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& rows);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
};

}  // namespace psd

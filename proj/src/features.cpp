#include "psd/features.hpp"

#include <cmath>
#include <numbers>

#include "psd/error.hpp"
#include "psd/fft.hpp"

namespace psd {

std::string_view feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Raw: return "raw";
    case FeatureKind::FftMag: return "fft_mag";
    case FeatureKind::StftMag: return "stft_mag";
    case FeatureKind::DwtHaar: return "dwt_haar";
    case FeatureKind::Pca: return "pca";
    case FeatureKind::SegmentSums: return "segment_sums";
    case FeatureKind::CumulativeCharge: return "cumulative_charge";
  }
  return "raw";
}

FeatureKind parse_feature_kind(std::string_view name) {
  for (auto k : {FeatureKind::Raw, FeatureKind::FftMag, FeatureKind::StftMag, FeatureKind::DwtHaar,
                 FeatureKind::Pca, FeatureKind::SegmentSums, FeatureKind::CumulativeCharge}) {
    if (feature_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown feature kind '" + std::string(name) + "'");
}

void FeatureSpec::validate() const {
  if (kind == FeatureKind::StftMag || pca_source == FeatureKind::StftMag) {
    if (stft_window < 1 || stft_hop < 1 || stft_hop > stft_window) {
      throw ConfigError("STFT needs 1 <= hop <= window");
    }
  }
  if (kind == FeatureKind::Pca && pca_components < 1) throw ConfigError("PCA needs k >= 1");
  if (kind == FeatureKind::Pca && pca_source == FeatureKind::Pca) {
    throw ConfigError("PCA source cannot itself be PCA");
  }
  if (kind == FeatureKind::SegmentSums && segments < 1) throw ConfigError("segments must be >= 1");
  if (kind == FeatureKind::CumulativeCharge && truncation_points < 1) {
    throw ConfigError("truncation_points must be >= 1");
  }
}

Eigen::VectorXd fft_magnitude(const Eigen::VectorXd& v) {
  const Eigen::VectorXcd x = dft(v);
  return x.head(v.size() / 2 + 1).cwiseAbs();
}

Eigen::VectorXd stft_magnitude(const Eigen::VectorXd& v, Eigen::Index window, Eigen::Index hop) {
  const Eigen::Index n = v.size();
  if (window > n) throw DataError("STFT window longer than the pulse");
  if (hop < 1 || hop > window) throw ConfigError("STFT needs 1 <= hop <= window");
  const Eigen::Index frames = 1 + (n - window + hop - 1) / hop;
  const Eigen::Index bins = window / 2 + 1;
  Eigen::VectorXd hann(window);
  for (Eigen::Index i = 0; i < window; ++i) {
    hann[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(window)));
  }
  Eigen::VectorXd out(frames * bins);
  Eigen::VectorXd frame(window);
  for (Eigen::Index f = 0; f < frames; ++f) {
    const Eigen::Index start = f * hop;
    for (Eigen::Index i = 0; i < window; ++i) {
      frame[i] = start + i < n ? v[start + i] * hann[i] : 0.0;
    }
    out.segment(f * bins, bins) = dft(frame).head(bins).cwiseAbs();
  }
  return out;
}

Eigen::VectorXd dwt_haar(const Eigen::VectorXd& v) {
  const Eigen::Index half = (v.size() + 1) / 2;
  Eigen::VectorXd out(2 * half);
  const double r = std::numbers::sqrt2 / 2.0;
  for (Eigen::Index i = 0; i < half; ++i) {
    const double a = v[2 * i];
    const double b = 2 * i + 1 < v.size() ? v[2 * i + 1] : 0.0;  // odd length: zero pad
    out[i] = (a + b) * r;
    out[half + i] = (a - b) * r;
  }
  return out;
}

Eigen::VectorXd segment_sums(const Eigen::VectorXd& v, Eigen::Index segments) {
  if (segments < 1 || segments > v.size()) throw ConfigError("segment count outside [1, length]");
  Eigen::VectorXd out(segments);
  for (Eigen::Index s = 0; s < segments; ++s) {
    const Eigen::Index lo = s * v.size() / segments;
    const Eigen::Index hi = (s + 1) * v.size() / segments;
    out[s] = v.segment(lo, hi - lo).sum();
  }
  return out;
}

Eigen::VectorXd cumulative_charge(const Eigen::VectorXd& v, Eigen::Index points) {
  if (points < 1) throw ConfigError("truncation_points must be >= 1");
  Eigen::VectorXd out(points);
  for (Eigen::Index i = 0; i < points; ++i) {
    const Eigen::Index cut = (i + 1) * v.size() / points;
    out[i] = v.head(cut).sum();
  }
  return out;
}

PcaBasis fit_pca_basis(const Eigen::MatrixXd& rows, Eigen::Index k) {
  if (rows.rows() < 2) throw DataError("PCA features need at least two training pulses");
  PcaBasis basis;
  basis.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - basis.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("PCA eigen-decomposition failed");
  k = std::min<Eigen::Index>(k, cov.cols());
  basis.components.resize(cov.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd w = solver.eigenvectors().col(cov.cols() - 1 - j);  // ascending order
    Eigen::Index m = 0;
    w.cwiseAbs().maxCoeff(&m);
    if (w[m] < 0) w = -w;
    basis.components.col(j) = w;
  }
  return basis;
}

namespace {

Eigen::VectorXd base_transform(const FeatureSpec& spec, FeatureKind kind, const Eigen::VectorXd& v) {
  switch (kind) {
    case FeatureKind::Raw: return v;
    case FeatureKind::FftMag: return fft_magnitude(v);
    case FeatureKind::StftMag: return stft_magnitude(v, spec.stft_window, spec.stft_hop);
    case FeatureKind::DwtHaar: return dwt_haar(v);
    case FeatureKind::SegmentSums: return segment_sums(v, spec.segments);
    case FeatureKind::CumulativeCharge: return cumulative_charge(v, spec.truncation_points);
    case FeatureKind::Pca: break;
  }
  throw ConfigError("PCA is not a base transform");
}

}  // namespace

FeatureSpec fit_features(FeatureSpec spec, const Dataset& training) {
  spec.validate();
  if (spec.kind != FeatureKind::Pca) return spec;
  if (training.empty()) throw DataError("cannot fit PCA features on an empty dataset");
  Eigen::VectorXd first = base_transform(spec, spec.pca_source, training.pulses.front().samples);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(training.size()), first.size());
  for (std::size_t i = 0; i < training.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) =
        base_transform(spec, spec.pca_source, training.pulses[i].samples).transpose();
  }
  spec.pca = fit_pca_basis(rows, spec.pca_components);
  return spec;
}

Eigen::VectorXd extract_features(const FeatureSpec& spec, const Eigen::VectorXd& pulse) {
  if (spec.kind != FeatureKind::Pca) return base_transform(spec, spec.kind, pulse);
  if (!spec.pca) throw ConfigError("PCA features used before fitting");
  const Eigen::VectorXd x = base_transform(spec, spec.pca_source, pulse);
  if (x.size() != spec.pca->mean.size()) throw DataError("PCA basis fitted for another length");
  return spec.pca->components.transpose() * (x - spec.pca->mean);
}

Eigen::MatrixXd extract_features(const FeatureSpec& spec, const Dataset& ds) {
  if (ds.empty()) return {};
  Eigen::VectorXd first = extract_features(spec, ds.pulses.front().samples);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(ds.size()), first.size());
  rows.row(0) = first.transpose();
  for (std::size_t i = 1; i < ds.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = extract_features(spec, ds.pulses[i].samples).transpose();
  }
  return rows;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw DataError("cannot standardize an empty feature matrix");
  Standardizer s;
  s.mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - s.mean;
  s.scale = (centered.colwise().squaredNorm() / static_cast<double>(rows.rows())).cwiseSqrt();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale[j] > 0)) s.scale[j] = 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& rows) const {
  return (rows.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::VectorXd Standardizer::transform(const Eigen::VectorXd& x) const {
  return ((x.transpose() - mean).array() / scale.array()).transpose();
}

}  // namespace psd

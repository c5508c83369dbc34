#include "psd/freq_domain.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "psd/error.hpp"
#include "psd/preprocess.hpp"

namespace psd {

double dft_energy(const Eigen::VectorXd& v) { return dft(v).squaredNorm(); }

double dft_factor(const Eigen::VectorXd& v) {
  const Eigen::Index peak = peak_index(v);
  const Eigen::VectorXd trim = v.tail(v.size() - peak);
  const auto n = static_cast<double>(trim.size());
  const double sum = trim.sum();
  double dst0 = 0.0;
  for (Eigen::Index t = 0; t < trim.size(); ++t) {
    dst0 += trim[t] * std::sin(std::numbers::pi * (static_cast<double>(t) + 0.5) / n);
  }
  const double dct0 = sum;
  if (sum == 0.0 || dst0 == 0.0) throw DataError("DFT: zero DCT_0/DST_0 of trimmed pulse");
  return dft_energy(trim) / (dst0 * dct0) / sum;
}

double fga_factor(const Eigen::VectorXd& v, double sample_rate, FgaVariant variant) {
  const Eigen::Index len = v.size();
  if (len < 2) throw DataError("FGA: need at least two samples");
  if (!(sample_rate > 0)) throw ConfigError("FGA: sample rate must be positive");
  const double l = static_cast<double>(len);
  double x0 = 0.0, c = 0.0, s = 0.0;
  for (Eigen::Index t = 0; t < len; ++t) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(t) / l;
    x0 += v[t];
    c += v[t] * std::cos(ang);
    s += v[t] * std::sin(ang);
  }
  const double x1 = variant == FgaVariant::Literal ? std::abs(c) - s : std::hypot(c, s);
  return l * std::abs(x0 - x1) / sample_rate;
}

Spectrum periodogram(const Eigen::VectorXd& v, double dt) {
  if (v.size() == 0) throw DataError("periodogram of an empty pulse");
  const Eigen::VectorXcd x = dft(v);
  const Eigen::Index n = v.size();
  Spectrum sp;
  sp.values.resize(n / 2 + 1);
  for (Eigen::Index k = 0; k <= n / 2; ++k) sp.values[k] = std::norm(x[k]) / static_cast<double>(n);
  sp.df = 1.0 / (static_cast<double>(n) * dt);
  return sp;
}

double spectral_slope(const Spectrum& spectrum) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (Eigen::Index k = 1; k < spectrum.values.size(); ++k) {
    const double p = spectrum.values[k];
    if (!(p > 0) || !std::isfinite(p)) continue;
    const double x = std::log(static_cast<double>(k) * spectrum.df);
    const double y = std::log(p);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw DataError("FS: fewer than two usable spectral bins");
  const double den = m * sxx - sx * sx;
  if (den == 0.0) throw DataError("FS: degenerate frequency axis");
  return (m * sxy - sx * sy) / den;
}

double fs_factor(const Spectrum& spectrum, double a, double b) {
  if (a == 0.0) throw ConfigError("FS: constant a must be non-zero");
  return b / a - spectral_slope(spectrum);
}

double sdcc_factor(const Eigen::VectorXd& v) {
  const double e = v.squaredNorm();
  if (!(e > 0)) throw DataError("SDCC: all-zero pulse");
  return std::log(e);
}

Eigen::VectorXd haar_wavelet(double scale) {
  const auto s = static_cast<Eigen::Index>(std::llround(scale));
  if (s < 2) throw ConfigError("Haar support must be at least 2 samples");
  const double h = 1.0 / std::sqrt(static_cast<double>(s));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(s);
  const Eigen::Index half = s / 2;
  w.head(half).setConstant(h);
  w.tail(half).setConstant(-h);
  return w;
}

Eigen::VectorXd marr_wavelet(double scale) {
  if (!(scale > 0)) throw ConfigError("Marr scale must be positive");
  const auto half = static_cast<Eigen::Index>(std::ceil(4.0 * scale));
  Eigen::VectorXd w(2 * half + 1);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double t = static_cast<double>(i - half) / scale;
    w[i] = (1.0 - t * t) * std::exp(-0.5 * t * t);
  }
  return w / w.norm();
}

namespace {

double weighted_abs_sum(const Eigen::VectorXd& w) {
  double s = 0.0;
  for (Eigen::Index t = 0; t < w.size(); ++t) s += std::abs(static_cast<double>(t) * w[t]);
  return s;
}

}  // namespace

double wt1_factor(const Eigen::VectorXd& v, double s1, double s2) {
  const double num = weighted_abs_sum(convolve_same(v, haar_wavelet(s1)));
  const double den = weighted_abs_sum(convolve_same(v, haar_wavelet(s2)));
  if (den == 0.0) throw DataError("WT1: zero denominator");
  return std::sqrt(num / den);
}

double wt2_factor(const Eigen::VectorXd& v, double marr_scale) {
  const double sum = v.sum();
  if (!(sum > 0)) throw DataError("WT2: non-positive pulse integral");
  const double pos = convolve_same(v, marr_wavelet(marr_scale)).cwiseMax(0.0).sum();
  const double den = sum + pos;
  if (den == 0.0) throw DataError("WT2: zero denominator");
  return 2.0 * sum / den;
}

std::vector<double> log_scales(int count, double lo, double hi) {
  if (count < 1 || !(lo > 0) || !(hi >= lo)) throw ConfigError("invalid scale grid");
  std::vector<double> s(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    s[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, f);
  }
  return s;
}

CwtPlan::CwtPlan(std::vector<double> scales, Eigen::Index signal_length)
    : scales_(std::move(scales)), length_(signal_length) {
  if (scales_.empty()) throw ConfigError("CWT needs at least one scale");
  convolvers_.reserve(scales_.size());
  for (double s : scales_) convolvers_.emplace_back(marr_wavelet(s), signal_length);
}

Eigen::MatrixXd CwtPlan::magnitude(const Eigen::VectorXd& v) const {
  if (v.size() != length_) throw DataError("CWT plan built for a different pulse length");
  // Scales share a handful of FFT sizes; transform the signal once per size.
  std::map<std::size_t, Eigen::VectorXcd> spectra;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(scales_.size()), length_);
  for (std::size_t i = 0; i < convolvers_.size(); ++i) {
    const auto& conv = convolvers_[i];
    auto it = spectra.find(conv.fft_size());
    if (it == spectra.end()) it = spectra.emplace(conv.fft_size(), padded_fft(v, conv.fft_size())).first;
    out.row(static_cast<Eigen::Index>(i)) = conv.apply_spectrum(it->second).cwiseAbs().transpose();
  }
  return out;
}

BinaryGrid binarize_scalogram(const Eigen::MatrixXd& magnitude, double threshold) {
  if (!(threshold > 0 && threshold < 1)) throw ConfigError("SD threshold must lie in (0,1)");
  const double cut = threshold * magnitude.maxCoeff();
  return magnitude.array() >= cut;
}

ScalogramMask build_scalogram_mask(const Dataset& refs_n, const Dataset& refs_g, double threshold,
                                   const std::vector<double>& scales, double min_difference) {
  if (refs_n.empty() || refs_g.empty()) throw DataError("SD: both reference classes required");
  if (refs_n.length() != refs_g.length()) throw DataError("SD: reference length mismatch");
  auto plan = std::make_shared<const CwtPlan>(scales, refs_n.length());
  auto mean_binary = [&](const Dataset& ds) {
    Eigen::ArrayXXd acc = Eigen::ArrayXXd::Zero(static_cast<Eigen::Index>(scales.size()), ds.length());
    for (const auto& p : ds.pulses) {
      acc += binarize_scalogram(plan->magnitude(p.samples), threshold).cast<double>();
    }
    return Eigen::ArrayXXd(acc / static_cast<double>(ds.size()));
  };
  const Eigen::ArrayXXd diff = (mean_binary(refs_n) - mean_binary(refs_g)).abs();
  ScalogramMask m;
  m.mask = diff > min_difference;
  m.threshold = threshold;
  m.scales = scales;
  m.plan = std::move(plan);
  if (m.cells() == 0) throw DataError("SD: discrimination mask is empty");
  return m;
}

double sd_factor(const BinaryGrid& binarized, const BinaryGrid& mask) {
  if (binarized.rows() != mask.rows() || binarized.cols() != mask.cols()) {
    throw DataError("SD: scalogram/mask shape mismatch");
  }
  const auto area = mask.count();
  if (area == 0) throw DataError("SD: empty mask");
  return static_cast<double>((binarized && mask).count()) / static_cast<double>(area);
}

double sd_factor(const Eigen::VectorXd& v, const ScalogramMask& mask) {
  if (!mask.plan || v.size() != mask.plan->signal_length()) {
    throw DataError("SD: pulse length does not match the mask time axis");
  }
  return sd_factor(binarize_scalogram(mask.plan->magnitude(v), mask.threshold), mask.mask);
}

}  // namespace psd

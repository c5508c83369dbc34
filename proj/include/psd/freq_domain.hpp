#pragma once

// Frequency-domain and wavelet discrimination factors.

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "psd/fft.hpp"
#include "psd/pulse.hpp"

namespace psd {

/// Non-negative one-sided power values with bin width df (Hz); bin k sits at
/// frequency k * df.
struct Spectrum {
  Eigen::VectorXd values;
  double df = 1.0;
};

enum class FgaVariant {
  Literal,    ///< X1 = |sum V cos| - sum V sin, exactly as published
  Magnitude,  ///< X1 = |sum V exp(-i 2 pi t / L)|
};

// --- DFT ratio --------------------------------------------------------------

/// sum_k |DFT(v)_k|^2 over the N-point transform.
double dft_energy(const Eigen::VectorXd& v);

/// On the pulse from its peak onward:
///   F = sum|DFT|^2 / (DST_0 * DCT_0) / sum(V_trim)
/// with type-II conventions DCT_0 = sum V, DST_0 = sum V(t) sin(pi (t + 0.5) / N).
double dft_factor(const Eigen::VectorXd& v);

// --- frequency gradient -----------------------------------------------------

/// F = L * |X0 - X1| / f_s.
double fga_factor(const Eigen::VectorXd& v, double sample_rate = 1.0,
                  FgaVariant variant = FgaVariant::Literal);

// --- fractal spectrum -------------------------------------------------------

/// One-sided |DFT_k|^2 / N for k = 0..N/2, df = 1 / (N dt).
Spectrum periodogram(const Eigen::VectorXd& v, double dt = 1.0);

/// Least-squares slope of log(power) against log(frequency) over the
/// positive-frequency bins with positive power (DC excluded).
double spectral_slope(const Spectrum& spectrum);

/// F = b / a - slope.
double fs_factor(const Spectrum& spectrum, double a = 1.0, double b = 1.0);

// --- SDCC -------------------------------------------------------------------

double sdcc_factor(const Eigen::VectorXd& v);

// --- wavelets ---------------------------------------------------------------

/// Haar wavelet of support round(s) (>= 2): +1/sqrt(s) on the first half,
/// -1/sqrt(s) on the second half, a zero middle tap for odd supports.
Eigen::VectorXd haar_wavelet(double scale);

/// Sampled Mexican hat (1 - (t/s)^2) exp(-t^2 / (2 s^2)) on t in
/// [-ceil(4s), ceil(4s)], scaled to unit energy.
Eigen::VectorXd marr_wavelet(double scale);

/// sqrt( sum_t |t * (V * haar_s1)(t)| / sum_t |t * (V * haar_s2)(t)| ).
double wt1_factor(const Eigen::VectorXd& v, double s1 = 28, double s2 = 40);

/// 2 sum V / (sum V + sum max(0, (V * marr_s)(t))).
double wt2_factor(const Eigen::VectorXd& v, double marr_scale = 4);

// --- scalogram discrimination -----------------------------------------------

/// `count` logarithmically spaced scales in [lo, hi].
std::vector<double> log_scales(int count = 50, double lo = 1.0, double hi = 64.0);

/// Mexican-hat CWT magnitudes (scale x time) for signals of one length.
class CwtPlan {
 public:
  CwtPlan(std::vector<double> scales, Eigen::Index signal_length);
  Eigen::MatrixXd magnitude(const Eigen::VectorXd& v) const;
  const std::vector<double>& scales() const { return scales_; }
  Eigen::Index signal_length() const { return length_; }

 private:
  std::vector<double> scales_;
  Eigen::Index length_;
  std::vector<FftConvolver> convolvers_;
};

using BinaryGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// B = |W| >= threshold * max|W|.
BinaryGrid binarize_scalogram(const Eigen::MatrixXd& magnitude, double threshold);

struct ScalogramMask {
  BinaryGrid mask;
  double threshold = 0.3;
  std::vector<double> scales;
  std::shared_ptr<const CwtPlan> plan;

  Eigen::Index cells() const { return mask.count(); }
};

/// Cell (scale, t) is in the mask iff the class-mean binarized values differ
/// by more than `min_difference`. Throws DataError when no cell qualifies.
ScalogramMask build_scalogram_mask(const Dataset& refs_n, const Dataset& refs_g, double threshold,
                                   const std::vector<double>& scales = log_scales(),
                                   double min_difference = 0.5);

/// Masked fraction of a given binarized scalogram.
double sd_factor(const BinaryGrid& binarized, const BinaryGrid& mask);
double sd_factor(const Eigen::VectorXd& v, const ScalogramMask& mask);

}  // namespace psd

#pragma once

// Time-domain discrimination factors. Integrals over t are inclusive sums over
// 0-based sample indices; gates are relative to the first maximum.

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "psd/error.hpp"
#include "psd/preprocess.hpp"
#include "psd/pulse.hpp"

namespace psd {

/// Peak-relative gate lengths in samples.
struct GateConfig {
  Eigen::Index t_pre = 10;
  Eigen::Index t_short = 20;
  Eigen::Index t_long = 160;
  Eigen::Index t_delay = 140;
  Eigen::Index t_total = 160;

  void validate() const {
    if (t_pre < 0) throw ConfigError("t_pre must be >= 0");
    if (!(0 < t_short && t_short < t_long)) throw ConfigError("gates need 0 < t_short < t_long");
    if (!(0 < t_delay && t_delay < t_total)) throw ConfigError("gates need 0 < t_delay < t_total");
  }
};

/// Peak-normalized class templates.
struct ReferencePair {
  Eigen::VectorXd v_n;
  Eigen::VectorXd v_gamma;
};

struct PmfPair {
  Eigen::VectorXd pmf_n;
  Eigen::VectorXd pmf_gamma;
  double epsilon = 1e-6;
};

struct PrincipalComponent {
  Eigen::VectorXd w;
  double eigenvalue = 0.0;
  int iterations = 0;
};

namespace detail {

template <typename Derived>
double window_sum(const Eigen::MatrixBase<Derived>& v, Eigen::Index lo, Eigen::Index hi) {
  if (lo < 0 || hi >= v.size()) {
    throw DataError("gate [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "] exceeds pulse of length " + std::to_string(v.size()));
  }
  return static_cast<double>(v.segment(lo, hi - lo + 1).sum());
}

inline double checked_ratio(double num, double den, const char* what) {
  if (den == 0.0) throw DataError(std::string(what) + ": zero total charge");
  return num / den;
}

}  // namespace detail

// --- charge comparison / charge integration --------------------------------

template <typename Derived>
double cc_factor(const Eigen::MatrixBase<Derived>& v, const GateConfig& g, Eigen::Index t_peak) {
  g.validate();
  const double tail = detail::window_sum(v, t_peak + g.t_short, t_peak + g.t_long);
  const double total = detail::window_sum(v, t_peak - g.t_pre, t_peak + g.t_long);
  return detail::checked_ratio(tail, total, "CC");
}

template <typename Derived>
double cc_factor(const Eigen::MatrixBase<Derived>& v, const GateConfig& g) {
  return cc_factor(v, g, peak_index(v));
}

template <typename Derived>
double ci_factor(const Eigen::MatrixBase<Derived>& v, const GateConfig& g, Eigen::Index t_peak) {
  g.validate();
  const double delayed =
      detail::window_sum(v, t_peak + g.t_total - g.t_delay, t_peak + g.t_total);
  const double total = detail::window_sum(v, t_peak - g.t_pre, t_peak + g.t_total);
  return detail::checked_ratio(delayed, total, "CI");
}

template <typename Derived>
double ci_factor(const Eigen::MatrixBase<Derived>& v, const GateConfig& g) {
  return ci_factor(v, g, peak_index(v));
}

// --- falling-edge percentage slope -----------------------------------------

/// First time after the peak at which the falling edge reaches `level`,
/// linearly interpolated between the bracketing samples.
template <typename Derived>
double falling_crossing(const Eigen::MatrixBase<Derived>& v, Eigen::Index from, double level) {
  for (Eigen::Index t = from + 1; t < v.size(); ++t) {
    const double a = static_cast<double>(v[t - 1]);
    const double b = static_cast<double>(v[t]);
    if (b <= level && a > level) return static_cast<double>(t - 1) + (a - level) / (a - b);
    if (b <= level && a <= level) return static_cast<double>(t - 1);
  }
  throw DataError("falling edge never reaches " + std::to_string(level) + " of the maximum");
}

/// Slope between the 60% and 10% crossings of the peak-normalized falling
/// edge, so the factor is independent of pulse amplitude.
template <typename Derived>
double feps_factor(const Eigen::MatrixBase<Derived>& v, double upper = 0.6, double lower = 0.1) {
  const Eigen::Index peak = peak_index(v);
  const double max = static_cast<double>(v[peak]);
  if (!(max > 0)) throw DataError("FEPS: non-positive maximum");
  const Eigen::VectorXd u = v.template cast<double>() / max;
  const double t_hi = falling_crossing(u, peak, upper);
  const double t_lo = falling_crossing(u, static_cast<Eigen::Index>(std::floor(t_hi)), lower);
  if (!(t_lo > t_hi)) throw DataError("FEPS: degenerate crossing interval");
  return (lower - upper) / (t_lo - t_hi);
}

// --- Gatti, log-likelihood ratio -------------------------------------------

/// P(t) = (V_n - V_g) / (V_n + V_g); references are clipped at zero first and
/// 0/0 maps to 0, so every weight lies in [-1, 1].
Eigen::VectorXd gatti_weights(const ReferencePair& refs);

template <typename Derived>
double gatti_factor(const Eigen::MatrixBase<Derived>& v, const Eigen::VectorXd& weights) {
  if (v.size() != weights.size()) throw DataError("GP: pulse/weight length mismatch");
  return static_cast<double>(v.template cast<double>().dot(weights));
}

/// Mean of peak-normalized pulses per class, renormalized to unit peak.
ReferencePair build_references(const Dataset& labeled);
ReferencePair build_references(const Dataset& ds, const std::vector<Label>& labels);

/// Per-class mean pulse clipped at zero and normalized to unit sum, then mixed
/// with a uniform floor: pmf = eps + (1 - L*eps) * q. Every entry is >= eps
/// and the sum stays 1.
PmfPair build_pmf(const Dataset& labeled, double epsilon = 1e-6);
PmfPair build_pmf(const Dataset& ds, const std::vector<Label>& labels, double epsilon = 1e-6);

/// Precomputed -log(pmf_n / pmf_gamma).
Eigen::VectorXd llr_weights(const PmfPair& pmfs);

template <typename Derived>
double llr_factor(const Eigen::MatrixBase<Derived>& v, const PmfPair& pmfs) {
  if (v.size() != pmfs.pmf_n.size() || v.size() != pmfs.pmf_gamma.size()) {
    throw DataError("LLR: pulse/PMF length mismatch");
  }
  return static_cast<double>(v.template cast<double>().dot(llr_weights(pmfs)));
}

template <typename Derived>
double llr_factor(const Eigen::MatrixBase<Derived>& v, const Eigen::VectorXd& llr_w) {
  if (v.size() != llr_w.size()) throw DataError("LLR: pulse/PMF length mismatch");
  return static_cast<double>(v.template cast<double>().dot(llr_w));
}

// --- log mean time -----------------------------------------------------------

template <typename Derived>
double lmt_factor(const Eigen::MatrixBase<Derived>& v) {
  double weighted = 0.0, total = 0.0;
  for (Eigen::Index t = 0; t < v.size(); ++t) {
    weighted += static_cast<double>(t) * static_cast<double>(v[t]);
    total += static_cast<double>(v[t]);
  }
  if (!(total > 0)) throw DataError("LMT: non-positive pulse sum");
  const double mean_time = weighted / total;
  if (!(mean_time > 0)) throw DataError("LMT: non-positive mean time");
  return std::log(mean_time);
}

// --- principal component -----------------------------------------------------

/// Dominant eigenvector of the sample covariance by power iteration
/// (tolerance 1e-10), sign fixed so the largest-magnitude entry is positive.
PrincipalComponent pca_fit(const Eigen::MatrixXd& rows);
PrincipalComponent pca_fit(const Dataset& training);

template <typename Derived>
double pca_factor(const Eigen::MatrixBase<Derived>& v, const PrincipalComponent& pc) {
  if (v.size() != pc.w.size()) throw DataError("PCA: pulse/component length mismatch");
  return std::abs(static_cast<double>(v.template cast<double>().dot(pc.w)));
}

// --- pulse gradient, pattern recognition -------------------------------------

template <typename Derived>
double pga_factor(const Eigen::MatrixBase<Derived>& v, Eigen::Index delta_t) {
  if (delta_t <= 0) throw ConfigError("PGA: delta_t must be positive");
  const Eigen::Index peak = peak_index(v);
  if (peak + delta_t >= v.size()) throw DataError("PGA: peak + delta_t beyond pulse end");
  return static_cast<double>(v[peak + delta_t] - v[peak]) / static_cast<double>(delta_t);
}

template <typename Derived, typename DerivedRef>
double pr_factor(const Eigen::MatrixBase<Derived>& v, const Eigen::MatrixBase<DerivedRef>& ref) {
  if (v.size() != ref.size()) throw DataError("PR: pulse/reference length mismatch");
  const double nv = static_cast<double>(v.norm());
  const double nr = static_cast<double>(ref.norm());
  if (nv == 0.0 || nr == 0.0) throw DataError("PR: zero-norm vector");
  const double c = static_cast<double>(v.dot(ref)) / (nv * nr);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// --- zero crossing ------------------------------------------------------------

/// Cascade of `stages` identical one-pole high-pass sections
/// y[t] = a * (y[t-1] + x[t] - x[t-1]), zero initial state.
template <typename Derived>
Eigen::VectorXd bipolar_shape(const Eigen::MatrixBase<Derived>& v, double a = 0.95,
                              int stages = 3) {
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("ZC: shaping coefficient must lie in (0,1)");
  if (stages < 1) throw ConfigError("ZC: at least one shaping stage");
  Eigen::VectorXd x = v.template cast<double>();
  Eigen::VectorXd y(x.size());
  for (int s = 0; s < stages; ++s) {
    double y_prev = 0.0, x_prev = 0.0;
    for (Eigen::Index t = 0; t < x.size(); ++t) {
      y[t] = a * (y_prev + x[t] - x_prev);
      y_prev = y[t];
      x_prev = x[t];
    }
    x = y;
  }
  return y;
}

/// Time of the first sign change after the dominant extremum of the bipolar
/// waveform, linearly interpolated, minus t_start.
template <typename Derived>
double zc_factor(const Eigen::MatrixBase<Derived>& bipolar, double t_start) {
  Eigen::Index ext = 0;
  bipolar.cwiseAbs().maxCoeff(&ext);
  const double ref = static_cast<double>(bipolar[ext]);
  if (ref == 0.0) throw DataError("ZC: flat shaped waveform");
  for (Eigen::Index t = ext + 1; t < bipolar.size(); ++t) {
    const double a = static_cast<double>(bipolar[t - 1]);
    const double b = static_cast<double>(bipolar[t]);
    if ((ref > 0 && b < 0) || (ref < 0 && b > 0)) {
      return static_cast<double>(t - 1) + a / (a - b) - t_start;
    }
  }
  throw DataError("ZC: shaped waveform never changes sign");
}

/// Default start time: a fraction of the time to the input pulse's peak.
template <typename Derived>
double zc_factor_for_pulse(const Eigen::MatrixBase<Derived>& v, double a = 0.95, int stages = 3,
                           double start_fraction = 0.1) {
  const double t_start = start_fraction * static_cast<double>(peak_index(v));
  return zc_factor(bipolar_shape(v, a, stages), t_start);
}

}  // namespace psd

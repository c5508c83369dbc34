#pragma once

// Pulse conditioning: corrupted-pulse detection, baseline/amplitude
// normalization, peak alignment, smoothing filters and energy cuts.
// Vector-level functions accept any Eigen dense expression.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psd/error.hpp"
#include "psd/pulse.hpp"

namespace psd {

struct RejectionFlags {
  bool flat_peak = false;
  bool multi_peak = false;
  bool non_finite = false;

  bool rejected() const { return flat_peak || multi_peak || non_finite; }
};

enum class FilterKind { MovingAverage, Median };

/// Index of the first maximum.
template <typename Derived>
Eigen::Index peak_index(const Eigen::MatrixBase<Derived>& v) {
  Eigen::Index idx = 0;
  v.maxCoeff(&idx);
  return idx;
}

/// flat_peak: at least `flat_run` consecutive samples equal the maximum.
/// multi_peak: more than one strict interior local maximum above
/// peak_fraction * max.
template <typename Derived>
RejectionFlags reject_corrupted(const Eigen::MatrixBase<Derived>& v, int flat_run = 3,
                                double peak_fraction = 0.5) {
  if (flat_run < 2) throw ConfigError("flat_run must be >= 2");
  if (!(peak_fraction > 0.0 && peak_fraction < 1.0)) {
    throw ConfigError("peak_fraction must lie in (0,1)");
  }
  RejectionFlags flags;
  const Eigen::Index n = v.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(static_cast<double>(v[i]))) flags.non_finite = true;
  }
  if (flags.non_finite || n == 0) return flags;

  const auto max = v.maxCoeff();
  int run = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    run = (v[i] == max) ? run + 1 : 0;
    if (run >= flat_run) flags.flat_peak = true;
  }
  const double level = peak_fraction * static_cast<double>(max);
  int peaks = 0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (v[i] > v[i - 1] && v[i] > v[i + 1] && static_cast<double>(v[i]) > level) ++peaks;
  }
  flags.multi_peak = peaks > 1;
  return flags;
}

template <typename Derived>
typename Derived::PlainObject baseline_subtract(const Eigen::MatrixBase<Derived>& v,
                                                Eigen::Index n_baseline) {
  if (n_baseline < 1 || n_baseline >= v.size()) {
    throw DataError("baseline window " + std::to_string(n_baseline) +
                    " outside [1, length) for length " + std::to_string(v.size()));
  }
  const auto offset = v.head(n_baseline).mean();
  return (v.array() - offset).matrix();
}

template <typename Derived>
typename Derived::PlainObject normalize_amplitude(const Eigen::MatrixBase<Derived>& v) {
  const auto max = v.maxCoeff();
  if (!(max > 0)) throw DataError("cannot normalize a pulse with non-positive maximum");
  return v / max;
}

/// Shift so the first maximum lands at `target_index`; vacated samples are 0.
template <typename Derived>
typename Derived::PlainObject align_to_peak(const Eigen::MatrixBase<Derived>& v,
                                            Eigen::Index target_index) {
  const Eigen::Index n = v.size();
  if (target_index < 0 || target_index >= n) throw DataError("alignment target out of range");
  const Eigen::Index shift = target_index - peak_index(v);
  typename Derived::PlainObject out = Derived::PlainObject::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = i + shift;
    if (j >= 0 && j < n) out[j] = v[i];
  }
  return out;
}

/// Centered sliding mean or median of odd `window`. Edge windows are
/// truncated to the samples that exist; an even-sized median window takes the
/// lower middle element.
template <typename Derived>
typename Derived::PlainObject filter_pulse(const Eigen::MatrixBase<Derived>& v, FilterKind kind,
                                           Eigen::Index window) {
  const Eigen::Index n = v.size();
  if (window < 1 || window % 2 == 0 || window > n) {
    throw ConfigError("filter window must be odd and within [1, length]");
  }
  using Scalar = typename Derived::Scalar;
  const Eigen::Index half = window / 2;
  typename Derived::PlainObject out(n);
  if (kind == FilterKind::MovingAverage) {
    // Accumulate deviations from the center sample: a constant run maps to
    // itself bit-exactly and window 1 is the identity.
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
      const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
      Scalar dev(0);
      for (Eigen::Index j = lo; j <= hi; ++j) dev += v[j] - v[i];
      out[i] = v[i] + dev / static_cast<Scalar>(hi - lo + 1);
    }
  } else {
    std::vector<Scalar> buf;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
      const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
      buf.clear();
      for (Eigen::Index j = lo; j <= hi; ++j) buf.push_back(v[j]);
      const std::size_t mid = (buf.size() - 1) / 2;
      std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
      out[i] = buf[mid];
    }
  }
  return out;
}

/// calibration * sum of samples.
template <typename Derived>
double pulse_energy(const Eigen::MatrixBase<Derived>& v, double calibration = 1.0) {
  return calibration * static_cast<double>(v.sum());
}

// Pulse-level wrappers keep dt and id.

inline Pulse with_samples(const Pulse& p, Eigen::VectorXd samples) {
  Pulse out;
  out.samples = std::move(samples);
  out.dt = p.dt;
  out.id = p.id;
  return out;
}

inline RejectionFlags reject_corrupted(const Pulse& p, int flat_run = 3,
                                       double peak_fraction = 0.5) {
  return reject_corrupted(p.samples, flat_run, peak_fraction);
}
inline Pulse baseline_subtract(const Pulse& p, Eigen::Index n) {
  return with_samples(p, baseline_subtract(p.samples, n));
}
inline Pulse normalize_amplitude(const Pulse& p) {
  return with_samples(p, normalize_amplitude(p.samples));
}
inline Pulse align_to_peak(const Pulse& p, Eigen::Index target) {
  return with_samples(p, align_to_peak(p.samples, target));
}
inline Pulse filter_pulse(const Pulse& p, FilterKind kind, Eigen::Index window) {
  return with_samples(p, filter_pulse(p.samples, kind, window));
}
inline double pulse_energy(const Pulse& p, double calibration = 1.0) {
  return pulse_energy(p.samples, calibration);
}

/// Pulses with calibration * sum >= threshold, order preserved.
inline Dataset apply_energy_threshold(const Dataset& ds, double threshold,
                                      double calibration = 1.0) {
  if (!(calibration > 0.0)) throw ConfigError("energy calibration must be positive");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.pulses.size(); ++i) {
    if (pulse_energy(ds.pulses[i], calibration) >= threshold) keep.push_back(i);
  }
  return ds.subset(keep);
}

}  // namespace psd

#pragma once

#include <cstdint>
#include <utility>

#include "psd/io.hpp"
#include "psd/pulse.hpp"

namespace psd {

/// Bi-exponential scintillation pulse with a multiplicative rise term:
///   A * (exp(-t/tau_fast) + tail_ratio * exp(-t/tau_slow)) * (1 - exp(-t/tau_rise))
/// with t = index - onset (zero before the onset) and Gaussian noise of
/// standard deviation noise_sigma * A. Time constants are in samples.
struct SynthParams {
  double tau_rise = 1.0;
  double tau_fast = 4.0;
  double tau_slow = 35.0;
  double tail_ratio = 0.1;
  std::pair<double, double> amplitude_range{0.5, 1.0};
  double noise_sigma = 0.01;
  Eigen::Index length = 256;
  Eigen::Index onset = 0;
  double dt = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// Noise-free shape for amplitude A.
  Eigen::VectorXd shape(double amplitude) const;

  /// Keys mirror the field names: tau_rise, tau_fast, tau_slow, tail_ratio,
  /// amplitude_min, amplitude_max, noise_sigma, length, onset, dt, seed.
  static SynthParams from_config(const KeyValueConfig& cfg, const SynthParams& defaults);
};

/// Calibrated class presets used by the CLI and the acceptance suite.
SynthParams default_neutron_params();
SynthParams default_gamma_params();

/// Labeled dataset; classes are interleaved by a seeded shuffle. Bit-identical
/// for fixed seeds.
Dataset synthesize_dataset(std::size_t n_neutron, std::size_t n_gamma, const SynthParams& neutron,
                           const SynthParams& gamma);

}  // namespace psd

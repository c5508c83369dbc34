#pragma once

// PCNN-family spiking networks over a 1-D pulse: one neuron per sample,
// neighbor coupling through a small kernel, binary firing against a decaying
// dynamic threshold.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "psd/io.hpp"

namespace psd {

enum class SnnModel { Pcnn, Scm, Qcscm, Rcnn };

/// Per-iteration update (Y is the previous firing map, S the stimulus):
///   PCNN/RCNN  F = f F + v_f (K*Y) + S;  L = l L + v_l (K*Y);  U = F (1 + beta L)
///   SCM        U = f U + S (K*Y) + S
///   QCSCM      U = U + step ((f - 1) U + S (K*Y) + S)
///   all        fire iff U > Theta;  Theta = g Theta + v_theta Y
/// QCSCM decays Theta by (1 - step (1 - g)) per step. Theta starts at v_theta.
/// RCNN redraws the off-center kernel taps uniformly in [0,1] each iteration
/// and normalizes them to unit sum.
struct SnnConfig {
  int iterations = 40;
  double step = 1.0;
  double f = 0.7;
  double l = 0.6;
  double g = 0.8;
  double beta = 0.2;
  double v_f = 0.1;
  double v_l = 0.1;
  double v_theta = 20.0;
  std::vector<double> kernel{0.5, 0.0, 0.5};
  std::uint64_t rng_seed = 0;

  void validate() const;
  static SnnConfig defaults(SnnModel model);
  /// Keys: iterations, step, f, l, g, beta, v_f, v_l, v_theta, kernel, seed.
  static SnnConfig from_config(const KeyValueConfig& cfg, const SnnConfig& defaults);
};

/// Cumulative firings per neuron (time index).
struct IgnitionMap {
  std::vector<int> counts;

  std::size_t size() const { return counts.size(); }
  long long total() const;
};

/// Negative samples are clipped to zero before stimulation.
IgnitionMap run_snn(const Eigen::VectorXd& pulse, SnnModel model, const SnnConfig& cfg);

/// Sum of all firings.
double ignition_sum(const IgnitionMap& map);
inline double pcnn_factor(const IgnitionMap& map) { return ignition_sum(map); }
inline double scm_factor(const IgnitionMap& map) { return ignition_sum(map); }
inline double rcnn_factor(const IgnitionMap& map) { return ignition_sum(map); }

/// Most frequent count; ties go to the smallest count value.
int ignition_mode(const IgnitionMap& map);

/// (I(t_max) - I(t_mode)) / (t_max - t_mode), t_mode the m-th (1-based) time
/// after t_max whose count equals the mode.
double lg_factor(const IgnitionMap& map, Eigen::Index t_max, int m = 1);

}  // namespace psd

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psd/io.hpp"
#include "psd/methods.hpp"
#include "psd/preprocess.hpp"
#include "psd/split.hpp"
#include "psd/synth.hpp"

namespace psd {

enum class OutputFormat { Json, Csv };

struct PreprocessOptions {
  bool reject = true;
  int flat_run = 3;
  double peak_fraction = 0.5;
  std::optional<FilterKind> filter = FilterKind::MovingAverage;
  Eigen::Index window = 5;
  Eigen::Index baseline_samples = 0;  ///< 0 disables baseline subtraction
  bool normalize = true;
  double calibration = 1.0;           ///< energy = calibration * sum of samples
};

/// Everything a run needs. Built from a key=value config file, then
/// overridden by command-line flags.
struct RunConfig {
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> labels;
  double dt = 1.0;
  std::size_t synth_neutrons = 5000;
  std::size_t synth_gammas = 5000;
  SynthParams synth_neutron = default_neutron_params();
  SynthParams synth_gamma = default_gamma_params();
  PreprocessOptions preprocess;
  std::vector<std::string> methods;
  SplitSpec split;
  std::vector<double> thresholds;
  std::filesystem::path out_dir = "psd_out";
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::Json;
  int knn_k = 5;
  bool plots = true;
  MethodParams params;
  KeyValueConfig raw;  ///< kept for learner hyperparameters

  static RunConfig from_config(const KeyValueConfig& cfg);
  /// Expands "all" / "statistical" and rejects unknown ids.
  void set_methods(const std::vector<std::string>& ids);
  void validate() const;
};

/// Dataset from disk, or synthesized when no path is configured.
Dataset acquire_dataset(const RunConfig& cfg);

struct PreprocessResult {
  Dataset data;                 ///< filtered / baseline-corrected, not yet normalized
  std::vector<double> energy;   ///< per kept pulse
  std::size_t rejected = 0;
};
PreprocessResult preprocess_dataset(const Dataset& ds, const PreprocessOptions& opts);

/// Pulses at or above the energy threshold, amplitude-normalized if enabled.
Dataset select_energy(const PreprocessResult& pre, std::optional<double> threshold, const PreprocessOptions& opts);

/// Outcome of a command: the worst per-method status decides the exit code.
struct RunSummary {
  int methods = 0;
  int errored = 0;
  std::vector<std::filesystem::path> written;
  bool all_failed() const { return methods > 0 && errored == methods; }
};

RunSummary run_synth(const RunConfig& cfg);
RunSummary run_discriminate(const RunConfig& cfg);
RunSummary run_benchmark(const RunConfig& cfg);
RunSummary run_train(const RunConfig& cfg);
RunSummary run_correlate(const RunConfig& cfg);

}  // namespace psd

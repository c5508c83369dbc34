#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "psd/features.hpp"
#include "psd/io.hpp"
#include "psd/knn.hpp"
#include "psd/linear.hpp"
#include "psd/mlp.hpp"

namespace psd {

enum class LearnerKind { Knn, Linear, Logistic, Mlp };

/// A learner id resolved to an algorithm and a feature pipeline.
///
///   KNN            k nearest neighbors on segment sums
///   LINRE, LOGRE   linear / logistic regression on two principal components
///   LRSTFT         logistic regression on principal components of the STFT
///   MLP1|MLP2|MLP3 optionally suffixed -RAW, -FT, -PCA, -STFT, -WT, -CQ
///
/// MLP2 without a suffix uses cumulative charge; MLP1 and MLP3 use raw samples.
struct LearnerSpec {
  std::string id;
  LearnerKind kind = LearnerKind::Mlp;
  FeatureSpec features;
  int k = 5;
  MlpPreset preset = MlpPreset::Mlp1;
  MlpTrainConfig mlp;
  int logistic_epochs = 500;
  double logistic_lr = 0.5;
};

bool is_learner_id(std::string_view id);
/// Throws ConfigError for unknown ids. Hyperparameters come from the [learn]
/// section of cfg when given (knn_k, epochs, batch, lr, logistic_epochs,
/// logistic_lr, stft_window, stft_hop, pca_components, segments,
/// truncation_points).
LearnerSpec parse_learner(std::string_view id, const KeyValueConfig& cfg = {});

enum class LearnerTask { Classify, Regress };

struct TrainedLearner {
  LearnerSpec spec;
  LearnerTask task = LearnerTask::Classify;
  Standardizer standardizer;
  double target_mean = 0;   ///< regression targets are standardized for training
  double target_scale = 1;
  std::variant<KnnModel, LinearModel, MlpModel> model;
  std::vector<double> epoch_loss;  ///< MLP training curve, empty otherwise

  /// Classification: neutron probability (KNN: neutron neighbor fraction).
  /// Regression: prediction in target units.
  double score(const Eigen::VectorXd& pulse) const;
  Eigen::VectorXd score(const Dataset& ds) const;
  Label classify(const Eigen::VectorXd& pulse) const;
  std::vector<Label> classify(const Dataset& ds) const;
};

/// Features are fitted on the training pulses; labels are required.
TrainedLearner train_classifier(const LearnerSpec& spec, const Dataset& training, std::uint64_t seed);
TrainedLearner train_regressor(const LearnerSpec& spec, const Dataset& training, const Eigen::VectorXd& targets,
                               std::uint64_t seed);

}  // namespace psd

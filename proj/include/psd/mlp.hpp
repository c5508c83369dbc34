#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace psd {

enum class MlpTask { Classify, Regress };

struct MlpTrainConfig {
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

/// Fully connected network: rectifier hidden units, sigmoid output for
/// classification, linear output for regression. weights[i] maps layer i to
/// layer i + 1 (rows = outputs).
struct MlpModel {
  std::vector<int> widths;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  MlpTask task = MlpTask::Classify;
  double dropout = 0.0;  ///< applied to hidden activations during training only

  int input_dim() const { return widths.front(); }
  std::size_t layers() const { return weights.size(); }
};

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct MlpTrainResult {
  MlpModel model;
  std::vector<double> epoch_loss;  ///< full-data loss after each epoch
};

/// He-uniform weights drawn from the seed, zero biases. widths = {input,
/// hidden..., 1}.
MlpModel mlp_init(std::vector<int> widths, std::uint64_t seed, MlpTask task, double dropout = 0.0);

/// Mean log-loss (classification) or mean squared error (regression) over the
/// rows of x; dropout disabled.
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Mini-batch gradient descent, epochs reshuffled from cfg.seed. Throws
/// NumericError naming the epoch if the loss stops being finite.
MlpTrainResult mlp_train(MlpModel model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const MlpTrainConfig& cfg);

double mlp_predict(const MlpModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd mlp_predict(const MlpModel& model, const Eigen::MatrixXd& rows);

enum class MlpPreset { Mlp1, Mlp2, Mlp3 };

/// Mlp1: no hidden layer. Mlp2: {10, 10} with dropout 0.2. Mlp3: seven
/// hidden layers of 64.
std::vector<int> preset_hidden(MlpPreset preset);
double preset_dropout(MlpPreset preset);

}  // namespace psd

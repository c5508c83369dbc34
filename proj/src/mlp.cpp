#include "psd/mlp.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "psd/error.hpp"
#include "psd/rng.hpp"

namespace psd {
namespace {

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_shapes(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.cols() != model.input_dim()) throw DataError("MLP: feature dimension mismatch");
  if (x.rows() != y.size()) throw DataError("MLP: sample/target count mismatch");
}

// Column-per-sample activations; masks are empty when dropout is off.
struct Forward {
  std::vector<Eigen::MatrixXd> act;  // act[0] = input, act.back() = output logits
  std::vector<Eigen::ArrayXXd> masks;
};

Forward forward(const MlpModel& m, const Eigen::MatrixXd& cols, Rng* dropout_rng) {
  Forward f;
  f.act.reserve(m.layers() + 1);
  f.act.push_back(cols);
  for (std::size_t l = 0; l < m.layers(); ++l) {
    Eigen::MatrixXd z = (m.weights[l] * f.act.back()).colwise() + m.biases[l];
    if (l + 1 < m.layers()) {
      z = z.cwiseMax(0.0);
      if (dropout_rng && m.dropout > 0) {
        Eigen::ArrayXXd mask(z.rows(), z.cols());
        const double keep = 1.0 - m.dropout;
        for (Eigen::Index j = 0; j < mask.cols(); ++j) {
          for (Eigen::Index i = 0; i < mask.rows(); ++i) {
            mask(i, j) = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
          }
        }
        z.array() *= mask;
        f.masks.push_back(std::move(mask));
      }
    }
    f.act.push_back(std::move(z));
  }
  return f;
}

double loss_from_output(MlpTask task, const Eigen::RowVectorXd& out, const Eigen::VectorXd& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (task == MlpTask::Classify) {
      s += softplus(out[i]) - y[i] * out[i];
    } else {
      const double r = out[i] - y[i];
      s += r * r;
    }
  }
  return s / static_cast<double>(out.size());
}

MlpGradients backward(const MlpModel& m, const Forward& f, const Eigen::VectorXd& y) {
  const auto n = static_cast<double>(y.size());
  const Eigen::RowVectorXd out = f.act.back().row(0);
  Eigen::MatrixXd delta(1, out.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    delta(0, i) = m.task == MlpTask::Classify ? (sigmoid(out[i]) - y[i]) / n
                                              : 2.0 * (out[i] - y[i]) / n;
  }
  MlpGradients g;
  g.weights.resize(m.layers());
  g.biases.resize(m.layers());
  for (std::size_t l = m.layers(); l-- > 0;) {
    g.weights[l] = delta * f.act[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = m.weights[l].transpose() * delta;
    // act[l] is post-ReLU (and post-dropout); zero entries carry no gradient.
    back.array() *= (f.act[l].array() > 0.0).cast<double>();
    if (!f.masks.empty()) back.array() *= f.masks[l - 1];
    delta = std::move(back);
  }
  return g;
}

}  // namespace

MlpModel mlp_init(std::vector<int> widths, std::uint64_t seed, MlpTask task, double dropout) {
  if (widths.size() < 2) throw ConfigError("MLP needs input and output widths");
  for (int w : widths) {
    if (w < 1) throw ConfigError("MLP layer widths must be positive");
  }
  if (widths.back() != 1) throw ConfigError("MLP output layer must have width 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  MlpModel m;
  m.widths = std::move(widths);
  m.task = task;
  m.dropout = dropout;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < m.widths.size(); ++l) {
    const int in = m.widths[l], out = m.widths[l + 1];
    const double bound = std::sqrt(6.0 / in);
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-bound, bound);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  return m;
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  check_shapes(model, x, y);
  const Forward f = forward(model, x.transpose(), nullptr);
  return loss_from_output(model.task, f.act.back().row(0), y);
}

MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& x,
                           const Eigen::VectorXd& y) {
  check_shapes(model, x, y);
  return backward(model, forward(model, x.transpose(), nullptr), y);
}

MlpTrainResult mlp_train(MlpModel model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const MlpTrainConfig& cfg) {
  check_shapes(model, x, y);
  if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0)) {
    throw ConfigError("MLP training needs epochs >= 1, batch >= 1, learning rate > 0");
  }
  if (x.rows() == 0) throw DataError("MLP: empty training set");
  Rng rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::MatrixXd cols = x.transpose();
  MlpTrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const auto b = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd bx(cols.rows(), b);
      Eigen::VectorXd by(b);
      for (Eigen::Index i = 0; i < b; ++i) {
        const Eigen::Index r = order[start + static_cast<std::size_t>(i)];
        bx.col(i) = cols.col(r);
        by[i] = y[r];
      }
      const Forward f = forward(model, bx, model.dropout > 0 ? &rng : nullptr);
      const MlpGradients g = backward(model, f, by);
      for (std::size_t l = 0; l < model.layers(); ++l) {
        model.weights[l] -= cfg.learning_rate * g.weights[l];
        model.biases[l] -= cfg.learning_rate * g.biases[l];
      }
    }
    const double loss = mlp_loss(model, x, y);
    if (!std::isfinite(loss)) {
      throw NumericError("MLP training diverged (non-finite loss) at epoch " + std::to_string(epoch));
    }
    result.epoch_loss.push_back(loss);
  }
  result.model = std::move(model);
  return result;
}

double mlp_predict(const MlpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.input_dim()) throw DataError("MLP: feature dimension mismatch");
  const Forward f = forward(model, x, nullptr);
  const double z = f.act.back()(0, 0);
  return model.task == MlpTask::Classify ? sigmoid(z) : z;
}

Eigen::VectorXd mlp_predict(const MlpModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.input_dim()) throw DataError("MLP: feature dimension mismatch");
  const Forward f = forward(model, rows.transpose(), nullptr);
  Eigen::VectorXd out = f.act.back().row(0).transpose();
  if (model.task == MlpTask::Classify) out = out.unaryExpr([](double z) { return sigmoid(z); });
  return out;
}

std::vector<int> preset_hidden(MlpPreset preset) {
  switch (preset) {
    case MlpPreset::Mlp1: return {};
    case MlpPreset::Mlp2: return {10, 10};
    case MlpPreset::Mlp3: return std::vector<int>(7, 64);
  }
  return {};
}

double preset_dropout(MlpPreset preset) { return preset == MlpPreset::Mlp2 ? 0.2 : 0.0; }

}  // namespace psd

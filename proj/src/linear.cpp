#include "psd/linear.hpp"

#include <cmath>

#include "psd/error.hpp"

namespace psd {
namespace {

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                       double ridge) {
  const Eigen::Index n = features.rows(), p = features.cols();
  if (targets.size() != n) throw DataError("linear fit: feature/target count mismatch");
  if (n < p + 1) throw DataError("linear fit: need at least dimension + 1 samples");

  // Rank test on the column-scaled, centered design: a feature that is
  // constant or a combination of others is collinear with the intercept.
  const Eigen::RowVectorXd mean = features.colwise().mean();
  Eigen::MatrixXd centered = features.rowwise() - mean;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = centered.col(j).norm();
    if (norm > 0) centered.col(j) /= norm;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(centered);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw NumericError("linear fit: singular design (collinear or constant features)");

  Eigen::VectorXd beta(p + 1);
  if (ridge > 0) {
    Eigen::MatrixXd a(n, p + 1);
    a.col(0).setOnes();
    a.rightCols(p) = features;
    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw NumericError("linear fit: normal equations failed");
    beta = ldlt.solve(a.transpose() * targets);
  } else {
    // Least squares on the centered, scaled design, then undo the scaling.
    const double y_mean = targets.mean();
    const Eigen::VectorXd w = qr.solve(Eigen::VectorXd(targets.array() - y_mean));
    for (Eigen::Index j = 0; j < p; ++j) {
      const double norm = (features.col(j).array() - mean[j]).matrix().norm();
      beta[j + 1] = w[j] / norm;
    }
    beta[0] = y_mean - mean.dot(beta.tail(p));
  }
  if (!beta.allFinite()) throw NumericError("linear fit: non-finite solution");
  LinearModel m;
  m.intercept = beta[0];
  m.coefficients = beta.tail(p);
  m.link = Link::Identity;
  return m;
}

LinearModel fit_logistic(const Eigen::MatrixXd& features, const std::vector<Label>& labels,
                         int epochs, double learning_rate) {
  const Eigen::Index n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size()) throw DataError("logistic fit: label count mismatch");
  if (n == 0) throw DataError("logistic fit: empty training set");
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = label_value(labels[static_cast<std::size_t>(i)]);
  LinearModel m;
  m.coefficients = Eigen::VectorXd::Zero(features.cols());
  m.link = Link::Logistic;
  for (int e = 0; e < epochs; ++e) {
    Eigen::VectorXd z = (features * m.coefficients).array() + m.intercept;
    const Eigen::VectorXd r = z.unaryExpr([](double v) { return sigmoid(v); }) - y;
    m.coefficients -= learning_rate * features.transpose() * r / static_cast<double>(n);
    m.intercept -= learning_rate * r.mean();
    if (!m.coefficients.allFinite() || !std::isfinite(m.intercept)) {
      throw NumericError("logistic fit diverged at epoch " + std::to_string(e));
    }
  }
  return m;
}

double predict(const LinearModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.coefficients.size()) throw DataError("linear predict: dimension mismatch");
  const double z = model.coefficients.dot(x) + model.intercept;
  return model.link == Link::Logistic ? sigmoid(z) : z;
}

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& rows) {
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = predict(model, Eigen::VectorXd(rows.row(i).transpose()));
  return out;
}

Label predict_label(const LinearModel& model, const Eigen::VectorXd& x) {
  return predict(model, x) >= 0.5 ? Label::Neutron : Label::Gamma;
}

}  // namespace psd

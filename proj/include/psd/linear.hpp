#pragma once

#include <vector>

#include <Eigen/Dense>

#include "psd/pulse.hpp"

namespace psd {

enum class Link { Identity, Logistic };

struct LinearModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  Link link = Link::Identity;
};

/// Least squares with an intercept, solved by column-pivoted QR on the
/// centered design. A positive ridge switches to the regularized normal
/// equations (A'A + ridge I) beta = A'y with A = [1 | X]. A rank-deficient
/// design (e.g. a constant feature column) is rejected with NumericError.
LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                       double ridge = 0.0);

/// Full-batch gradient descent on the mean log-loss from zero weights.
LinearModel fit_logistic(const Eigen::MatrixXd& features, const std::vector<Label>& labels,
                         int epochs = 500, double learning_rate = 0.5);

/// Applies the link: a real for identity, a probability for logistic.
double predict(const LinearModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& rows);
/// probability (or linear output) >= 0.5.
Label predict_label(const LinearModel& model, const Eigen::VectorXd& x);

}  // namespace psd

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "psd/pulse.hpp"

namespace psd {

/// Support-weighted averages over the two classes.
struct ClassificationMetrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

ClassificationMetrics classification_metrics(std::span<const Label> truth, std::span<const Label> predicted);

struct RocCurve {
  std::vector<double> fpr;  ///< starts at 0, ends at 1
  std::vector<double> tpr;
  double auc = 0.5;
  /// True when low scores indicate neutrons; the curve is then built on the
  /// negated scores so that auc >= 0.5.
  bool inverted = false;
};

/// Neutron is the positive class. One vertex per unique score.
RocCurve roc_auc(const Eigen::VectorXd& scores, std::span<const Label> labels);

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// Symmetric matrix with unit diagonal. Throws DataError on a constant series.
Eigen::MatrixXd pearson_matrix(const std::vector<Eigen::VectorXd>& series);

}  // namespace psd

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "psd/pulse.hpp"

namespace psd {

/// Brute-force Euclidean k-nearest-neighbor model. Rows of `features` are
/// training points; either `labels` or `targets` is populated.
struct KnnModel {
  Eigen::MatrixXd features;
  std::vector<Label> labels;
  Eigen::VectorXd targets;
  int k = 5;

  Eigen::Index size() const { return features.rows(); }
};

KnnModel knn_fit(Eigen::MatrixXd features, std::vector<Label> labels, int k);
KnnModel knn_fit(Eigen::MatrixXd features, Eigen::VectorXd targets, int k);

/// Indices of the k nearest training rows, nearest first; equal distances are
/// ordered by training index.
std::vector<Eigen::Index> knn_neighbors(const KnnModel& model, const Eigen::VectorXd& query);

/// Majority label; among tied classes the one holding the nearest neighbor wins.
Label knn_classify(const KnnModel& model, const Eigen::VectorXd& query);
/// Fraction of neutron-labelled neighbors.
double knn_score(const KnnModel& model, const Eigen::VectorXd& query);
/// Mean target of the k nearest.
double knn_regress(const KnnModel& model, const Eigen::VectorXd& query);

}  // namespace psd

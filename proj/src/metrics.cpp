#include "psd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psd/error.hpp"

namespace psd {

ClassificationMetrics classification_metrics(std::span<const Label> truth,
                                             std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw DataError("metrics: length mismatch");
  if (truth.empty()) throw DataError("metrics: empty input");
  // counts[t][p]
  double counts[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    counts[static_cast<int>(truth[i])][static_cast<int>(predicted[i])] += 1;
  }
  const double n = static_cast<double>(truth.size());
  ClassificationMetrics m;
  m.accuracy = counts[0][0] / n + counts[1][1] / n;
  for (int c = 0; c < 2; ++c) {
    const double tp = counts[c][c];
    const double support = counts[c][0] + counts[c][1];
    const double predicted_c = counts[0][c] + counts[1][c];
    const double precision = predicted_c > 0 ? tp / predicted_c : 0.0;
    const double recall = support > 0 ? tp / support : 0.0;
    const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    const double w = support / n;
    m.precision += w * precision;
    // support/n * tp/support, written so it matches accuracy bit for bit
    m.recall += tp / n;
    m.f1 += w * f1;
  }
  return m;
}

namespace {

RocCurve sweep(const Eigen::VectorXd& scores, std::span<const Label> labels) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });
  double pos = 0, neg = 0;
  for (Label l : labels) (l == Label::Neutron ? pos : neg) += 1;

  RocCurve roc;
  roc.fpr.push_back(0);
  roc.tpr.push_back(0);
  double tp = 0, fp = 0, area = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    double dtp = 0, dfp = 0;
    while (i < order.size() && scores[order[i]] == s) {
      (labels[static_cast<std::size_t>(order[i])] == Label::Neutron ? dtp : dfp) += 1;
      ++i;
    }
    // Trapezoid in raw counts; divided once at the end.
    area += dfp * (tp + 0.5 * dtp);
    tp += dtp;
    fp += dfp;
    roc.fpr.push_back(fp / neg);
    roc.tpr.push_back(tp / pos);
  }
  roc.auc = area / (pos * neg);
  return roc;
}

}  // namespace

RocCurve roc_auc(const Eigen::VectorXd& scores, std::span<const Label> labels) {
  if (static_cast<std::size_t>(scores.size()) != labels.size()) throw DataError("ROC: length mismatch");
  if (!scores.allFinite()) throw DataError("ROC: non-finite score");
  const auto pos = std::count(labels.begin(), labels.end(), Label::Neutron);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
    throw DataError("ROC needs both classes");
  }
  RocCurve roc = sweep(scores, labels);
  if (roc.auc < 0.5) {
    roc = sweep(-scores, labels);
    roc.inverted = true;
  }
  return roc;
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw DataError("pearson: length mismatch");
  if (x.size() < 2) throw DataError("pearson: need at least two values");
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double sxx = dx.square().sum(), syy = dy.square().sum();
  if (!(sxx > 0) || !(syy > 0)) throw DataError("pearson: constant series");
  return (dx * dy).sum() / std::sqrt(sxx * syy);
}

Eigen::MatrixXd pearson_matrix(const std::vector<Eigen::VectorXd>& series) {
  const auto k = static_cast<Eigen::Index>(series.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      r(i, j) = r(j, i) = pearson(series[static_cast<std::size_t>(i)], series[static_cast<std::size_t>(j)]);
    }
  }
  if (k == 1) pearson(series[0], series[0]);  // still reject a constant series
  return r;
}

}  // namespace psd

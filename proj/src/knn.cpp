#include "psd/knn.hpp"

#include <algorithm>
#include <numeric>

#include "psd/error.hpp"

namespace psd {
namespace {

void check_k(Eigen::Index n, int k) {
  if (n == 0) throw DataError("KNN: empty training set");
  if (k < 1 || k > n) throw ConfigError("KNN: k must lie in [1, training size]");
}

}  // namespace

KnnModel knn_fit(Eigen::MatrixXd features, std::vector<Label> labels, int k) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("KNN: feature/label count mismatch");
  }
  check_k(features.rows(), k);
  KnnModel m;
  m.features = std::move(features);
  m.labels = std::move(labels);
  m.k = k;
  return m;
}

KnnModel knn_fit(Eigen::MatrixXd features, Eigen::VectorXd targets, int k) {
  if (features.rows() != targets.size()) throw DataError("KNN: feature/target count mismatch");
  check_k(features.rows(), k);
  KnnModel m;
  m.features = std::move(features);
  m.targets = std::move(targets);
  m.k = k;
  return m;
}

std::vector<Eigen::Index> knn_neighbors(const KnnModel& model, const Eigen::VectorXd& query) {
  check_k(model.size(), model.k);
  if (query.size() != model.features.cols()) throw DataError("KNN: query dimension mismatch");
  const Eigen::VectorXd d2 = (model.features.rowwise() - query.transpose()).rowwise().squaredNorm();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(model.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto closer = [&](Eigen::Index a, Eigen::Index b) {
    return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
  };
  const auto kth = idx.begin() + model.k;
  std::nth_element(idx.begin(), kth - 1, idx.end(), closer);
  std::sort(idx.begin(), kth, closer);
  idx.resize(static_cast<std::size_t>(model.k));
  return idx;
}

Label knn_classify(const KnnModel& model, const Eigen::VectorXd& query) {
  if (model.labels.empty()) throw ConfigError("KNN: model has no class labels");
  const auto nn = knn_neighbors(model, query);
  int votes[2] = {0, 0};
  for (auto i : nn) ++votes[static_cast<int>(model.labels[static_cast<std::size_t>(i)])];
  if (votes[0] != votes[1]) return votes[1] > votes[0] ? Label::Neutron : Label::Gamma;
  return model.labels[static_cast<std::size_t>(nn.front())];
}

double knn_score(const KnnModel& model, const Eigen::VectorXd& query) {
  if (model.labels.empty()) throw ConfigError("KNN: model has no class labels");
  const auto nn = knn_neighbors(model, query);
  double n = 0;
  for (auto i : nn) n += label_value(model.labels[static_cast<std::size_t>(i)]);
  return n / static_cast<double>(nn.size());
}

double knn_regress(const KnnModel& model, const Eigen::VectorXd& query) {
  if (model.targets.size() == 0) throw ConfigError("KNN: model has no regression targets");
  const auto nn = knn_neighbors(model, query);
  double s = 0;
  for (auto i : nn) s += model.targets[i];
  return s / static_cast<double>(nn.size());
}

}  // namespace psd

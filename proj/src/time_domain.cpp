#include "psd/time_domain.hpp"

#include <cmath>

namespace psd {
namespace {

std::pair<Eigen::VectorXd, Eigen::VectorXd> class_means(const Dataset& ds,
                                                         const std::vector<Label>& labels,
                                                         bool normalize_each) {
  if (labels.size() != ds.size()) throw DataError("label count does not match pulse count");
  const Eigen::Index n = ds.length();
  Eigen::VectorXd sum_n = Eigen::VectorXd::Zero(n), sum_g = Eigen::VectorXd::Zero(n);
  std::size_t cnt_n = 0, cnt_g = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds.pulses[i].samples;
    Eigen::VectorXd v = s;
    if (normalize_each) {
      const double max = s.maxCoeff();
      if (!(max > 0)) continue;
      v /= max;
    }
    if (labels[i] == Label::Neutron) {
      sum_n += v;
      ++cnt_n;
    } else {
      sum_g += v;
      ++cnt_g;
    }
  }
  if (cnt_n == 0 || cnt_g == 0) throw DataError("reference construction needs both classes");
  return {sum_n / static_cast<double>(cnt_n), sum_g / static_cast<double>(cnt_g)};
}

const std::vector<Label>& require_labels(const Dataset& ds) {
  if (!ds.labels) throw DataError("reference construction needs a labeled dataset");
  return *ds.labels;
}

}  // namespace

Eigen::VectorXd gatti_weights(const ReferencePair& refs) {
  if (refs.v_n.size() != refs.v_gamma.size()) throw DataError("GP: reference length mismatch");
  Eigen::VectorXd p(refs.v_n.size());
  for (Eigen::Index t = 0; t < p.size(); ++t) {
    const double a = std::max(refs.v_n[t], 0.0);
    const double b = std::max(refs.v_gamma[t], 0.0);
    p[t] = (a + b) == 0.0 ? 0.0 : (a - b) / (a + b);
  }
  return p;
}

ReferencePair build_references(const Dataset& ds, const std::vector<Label>& labels) {
  auto [n, g] = class_means(ds, labels, true);
  const double mn = n.maxCoeff(), mg = g.maxCoeff();
  if (!(mn > 0 && mg > 0)) throw DataError("reference pulses have non-positive peaks");
  return {n / mn, g / mg};
}

ReferencePair build_references(const Dataset& labeled) {
  return build_references(labeled, require_labels(labeled));
}

PmfPair build_pmf(const Dataset& ds, const std::vector<Label>& labels, double epsilon) {
  const Eigen::Index n = ds.length();
  if (!(epsilon > 0) || epsilon * static_cast<double>(n) >= 1.0) {
    throw ConfigError("LLR: epsilon must be positive and below 1/length");
  }
  auto [mean_n, mean_g] = class_means(ds, labels, false);
  auto to_pmf = [&](Eigen::VectorXd m) {
    m = m.cwiseMax(0.0);
    const double s = m.sum();
    if (!(s > 0)) throw DataError("LLR: class mean pulse has no positive mass");
    m /= s;
    return Eigen::VectorXd((epsilon + (1.0 - static_cast<double>(n) * epsilon) * m.array()).matrix());
  };
  return {to_pmf(mean_n), to_pmf(mean_g), epsilon};
}

PmfPair build_pmf(const Dataset& labeled, double epsilon) {
  return build_pmf(labeled, require_labels(labeled), epsilon);
}

Eigen::VectorXd llr_weights(const PmfPair& pmfs) {
  if (pmfs.pmf_n.size() != pmfs.pmf_gamma.size()) throw DataError("LLR: PMF length mismatch");
  return -(pmfs.pmf_n.array() / pmfs.pmf_gamma.array()).log().matrix();
}

PrincipalComponent pca_fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw DataError("PCA: need at least two training pulses");
  const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
  const double scale = cov.diagonal().maxCoeff();
  if (!(scale > 0)) throw DataError("PCA: degenerate covariance (identical pulses)");

  // Start from the covariance column of largest variance plus a ones-vector
  // image, which cannot both be orthogonal to the dominant direction unless
  // the covariance is degenerate.
  Eigen::Index j = 0;
  cov.diagonal().maxCoeff(&j);
  Eigen::VectorXd w = cov.col(j) + cov * Eigen::VectorXd::Ones(cov.cols()) * 1e-3;
  w.normalize();

  PrincipalComponent pc;
  constexpr int kMaxIter = 100000;
  for (int it = 1; it <= kMaxIter; ++it) {
    Eigen::VectorXd next = cov * w;
    const double norm = next.norm();
    if (!(norm > 0)) throw DataError("PCA: degenerate covariance");
    next /= norm;
    // Sign-insensitive change, since the iterate may flip for negative
    // eigenvalues of equal magnitude.
    const double delta = std::min((next - w).norm(), (next + w).norm());
    w = next;
    pc.iterations = it;
    if (delta < 1e-10) break;
  }
  Eigen::Index k = 0;
  w.cwiseAbs().maxCoeff(&k);
  if (w[k] < 0) w = -w;
  pc.w = w;
  pc.eigenvalue = w.dot(cov * w);
  return pc;
}

PrincipalComponent pca_fit(const Dataset& training) { return pca_fit(training.matrix()); }

}  // namespace psd

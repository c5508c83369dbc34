// Independent reference implementations used only by the tests. Each one is
// the slow, obvious version of something the library does faster.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psd/error.hpp"
#include "psd/pulse.hpp"
#include "psd/rng.hpp"

namespace oracle {

// Full linear convolution cropped to x.size() samples from (m-1)/2.
inline Eigen::VectorXd direct_convolve_same(const Eigen::VectorXd& x, const Eigen::VectorXd& k) {
  const Eigen::Index n = x.size(), m = k.size(), off = (m - 1) / 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index full = i + off;
    long double acc = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index xi = full - j;
      if (xi >= 0 && xi < n) acc += static_cast<long double>(x[xi]) * k[j];
    }
    out[i] = static_cast<double>(acc);
  }
  return out;
}

// Pairwise comparison count with ties worth one half.
inline double mann_whitney_auc(const Eigen::VectorXd& s, const std::vector<psd::Label>& y) {
  double wins = 0, pairs = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (y[static_cast<std::size_t>(i)] != psd::Label::Neutron) continue;
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (y[static_cast<std::size_t>(j)] != psd::Label::Gamma) continue;
      pairs += 1;
      if (s[i] > s[j]) wins += 1;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Indices of all training rows sorted by (squared distance, index).
inline std::vector<Eigen::Index> sorted_by_distance(const Eigen::MatrixXd& train, const Eigen::VectorXd& q) {
  std::vector<std::pair<double, Eigen::Index>> d;
  for (Eigen::Index i = 0; i < train.rows(); ++i) d.emplace_back((train.row(i).transpose() - q).squaredNorm(), i);
  std::sort(d.begin(), d.end());
  std::vector<Eigen::Index> out;
  for (auto& [dist, i] : d) out.push_back(i);
  return out;
}

inline psd::Label knn_vote(const Eigen::MatrixXd& train, const std::vector<psd::Label>& labels,
                           const Eigen::VectorXd& q, int k) {
  const auto order = sorted_by_distance(train, q);
  int votes[2] = {0, 0};
  for (int i = 0; i < k; ++i) ++votes[static_cast<int>(labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])];
  if (votes[0] != votes[1]) return votes[1] > votes[0] ? psd::Label::Neutron : psd::Label::Gamma;
  return labels[static_cast<std::size_t>(order[0])];
}

inline double knn_mean(const Eigen::MatrixXd& train, const Eigen::VectorXd& targets, const Eigen::VectorXd& q, int k) {
  const auto order = sorted_by_distance(train, q);
  double s = 0;
  for (int i = 0; i < k; ++i) s += targets[order[static_cast<std::size_t>(i)]];
  return s / k;
}

// Largest eigenvalue of a symmetric 2x2 or 3x3 matrix from its
// characteristic polynomial (closed form; trigonometric for 3x3).
inline double largest_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 2) {
    const double m = 0.5 * (a(0, 0) + a(1, 1));
    const double d = 0.5 * (a(0, 0) - a(1, 1));
    return m + std::sqrt(d * d + a(0, 1) * a(0, 1));
  }
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2 * p * std::cos(phi);
}

// Eigenvector for a known eigenvalue: cross product of two rows of (A - lI)
// in 3-D, or the orthogonal complement of a row in 2-D.
inline Eigen::VectorXd eigenvector_for(const Eigen::MatrixXd& a, double lambda) {
  const Eigen::MatrixXd m = a - lambda * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::VectorXd v(a.rows());
  if (a.rows() == 2) {
    if (std::abs(m(0, 1)) + std::abs(m(0, 0)) > std::abs(m(1, 0)) + std::abs(m(1, 1))) {
      v << -m(0, 1), m(0, 0);
    } else {
      v << -m(1, 1), m(1, 0);
    }
  } else {
    const Eigen::Vector3d r0 = m.row(0), r1 = m.row(1), r2 = m.row(2);
    Eigen::Vector3d best = r0.cross(r1);
    for (const Eigen::Vector3d c : {Eigen::Vector3d(r0.cross(r2)), Eigen::Vector3d(r1.cross(r2))}) {
      if (c.norm() > best.norm()) best = c;
    }
    v = best;
  }
  return v.normalized();
}

}  // namespace oracle

namespace testutil {

// Positive bi-exponential-ish pulse with random parameters and noise.
inline Eigen::VectorXd random_pulse(psd::Rng& rng, Eigen::Index n = 128) {
  const double onset = 5 + std::floor(rng.uniform(0, 15));
  const double fast = rng.uniform(2, 6), slow = rng.uniform(20, 50), tail = rng.uniform(0.05, 0.5);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - onset;
    const double shape = t < 0 ? 0 : (std::exp(-t / fast) + tail * std::exp(-t / slow)) * (1 - std::exp(-t));
    v[i] = shape + 0.005 * rng.normal();
  }
  return v;
}

inline psd::Dataset make_dataset(const std::vector<Eigen::VectorXd>& rows,
                                 std::optional<std::vector<psd::Label>> labels = std::nullopt) {
  psd::Dataset ds;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    psd::Pulse p;
    p.samples = rows[i];
    p.id = static_cast<std::int64_t>(i);
    ds.pulses.push_back(p);
  }
  ds.labels = std::move(labels);
  return ds;
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("psd_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil

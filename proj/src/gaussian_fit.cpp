#include "psd/gaussian_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "psd/error.hpp"

namespace psd {
namespace {

using Params = Eigen::Matrix<double, 6, 1>;  // a1, mu1, s1, a2, mu2, s2

constexpr const char* kPinnedNote = "width parameter pinned at a bound";

const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

double density(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

struct Problem {
  Eigen::VectorXd x, y;
  double mu_lo, mu_hi, sigma_lo, sigma_hi;

  bool in_bounds(const Params& p) const {
    for (int c = 0; c < 2; ++c) {
      const double a = p[3 * c], mu = p[3 * c + 1], s = p[3 * c + 2];
      if (!(a > 0) || mu < mu_lo || mu > mu_hi || s < sigma_lo || s > sigma_hi) return false;
    }
    return true;
  }

  Eigen::VectorXd residual(const Params& p) const {
    Eigen::VectorXd r(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      r[i] = p[0] * density(x[i], p[1], p[2]) + p[3] * density(x[i], p[4], p[5]) - y[i];
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const Params& p) const {
    Eigen::MatrixXd j(x.size(), 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      for (int c = 0; c < 2; ++c) {
        const double a = p[3 * c], mu = p[3 * c + 1], s = p[3 * c + 2];
        const double g = density(x[i], mu, s);
        const double z = (x[i] - mu) / s;
        j(i, 3 * c) = g;
        j(i, 3 * c + 1) = a * g * z / s;
        j(i, 3 * c + 2) = a * g * (z * z - 1.0) / s;
      }
    }
    return j;
  }
};

Eigen::VectorXd smooth(const std::vector<long long>& counts) {
  const auto n = static_cast<Eigen::Index>(counts.size());
  const Eigen::Index half = std::max<Eigen::Index>(1, n / 50);
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min(n - 1, i + half);
    double sum = 0;
    for (Eigen::Index j = lo; j <= hi; ++j) sum += static_cast<double>(counts[static_cast<std::size_t>(j)]);
    s[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return s;
}

// Plateaus count once, at their first index.
std::vector<Eigen::Index> local_maxima(const Eigen::VectorXd& s) {
  std::vector<Eigen::Index> peaks;
  const Eigen::Index n = s.size();
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const bool left_ok = i == 0 || s[i - 1] < s[i];
    const bool right_ok = j == n - 1 || s[j + 1] < s[i];
    if (left_ok && right_ok && s[i] > 0) peaks.push_back(i);
    i = j + 1;
  }
  return peaks;
}

// Distance from the peak to the half-height crossing, searched away from the
// other peak; converted to sigma.
double half_width_sigma(const Eigen::VectorXd& s, Eigen::Index peak, int direction, double bw) {
  const double half = 0.5 * s[peak];
  Eigen::Index i = peak;
  while (i + direction >= 0 && i + direction < s.size() && s[i] > half) i += direction;
  const double hw = std::abs(static_cast<double>(i - peak)) * bw;
  return std::max(hw, bw) / std::sqrt(2.0 * std::numbers::ln2);
}

}  // namespace

GaussianPairFit fit_two_gaussians(const Histogram& hist, const GaussianFitOptions& opts) {
  GaussianPairFit fit;
  if (hist.bins() < 2) throw DataError("two-Gaussian fit needs at least two bins");
  if (hist.non_empty() < 6) {
    fit.note = "fewer than 6 non-empty bins";
    return fit;
  }
  const auto n = static_cast<Eigen::Index>(hist.bins());
  const double bw = hist.bin_width();
  const double range = hist.edges.back() - hist.edges.front();

  Problem prob;
  prob.x.resize(n);
  prob.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    prob.x[i] = hist.center(static_cast<std::size_t>(i));
    prob.y[i] = static_cast<double>(hist.counts[static_cast<std::size_t>(i)]);
  }
  prob.mu_lo = hist.edges.front();
  prob.mu_hi = hist.edges.back();
  prob.sigma_lo = bw / 2;
  prob.sigma_hi = range;

  // Initialization: tallest smoothed maximum, then the tallest other maximum
  // that is separated from it by a valley.
  const Eigen::VectorXd s = smooth(hist.counts);
  std::vector<Eigen::Index> peaks = local_maxima(s);
  std::sort(peaks.begin(), peaks.end(), [&](Eigen::Index a, Eigen::Index b) {
    return s[a] != s[b] ? s[a] > s[b] : a < b;
  });
  if (peaks.size() < 2) {
    fit.note = "single-peak histogram";
    return fit;
  }
  const Eigen::Index p1 = peaks[0];
  Eigen::Index p2 = -1;
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    const Eigen::Index q = peaks[k];
    if (s[q] < opts.min_peak_ratio * s[p1]) break;
    const Eigen::Index lo = std::min(p1, q), hi = std::max(p1, q);
    const double valley = s.segment(lo, hi - lo + 1).minCoeff();
    if (valley < opts.valley_ratio * s[q]) {
      p2 = q;
      break;
    }
  }
  if (p2 < 0) {
    fit.note = "no second peak separated by a valley";
    return fit;
  }

  Params p;
  const int dir1 = p1 < p2 ? -1 : 1;
  const double s1 = std::clamp(half_width_sigma(s, p1, dir1, bw), prob.sigma_lo, prob.sigma_hi);
  const double s2 = std::clamp(half_width_sigma(s, p2, -dir1, bw), prob.sigma_lo, prob.sigma_hi);
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);
  p << s[p1] * s1 * root2pi, prob.x[p1], s1, s[p2] * s2 * root2pi, prob.x[p2], s2;

  // Levenberg-Marquardt with diagonal (Marquardt) scaling; steps that leave
  // the bounds are treated as rejected.
  double lambda = opts.initial_damping;
  Eigen::VectorXd r = prob.residual(p);
  double sse = r.squaredNorm();
  bool stationary = false;
  int it = 0;
  for (; it < opts.max_iterations && !stationary; ++it) {
    const Eigen::MatrixXd j = prob.jacobian(p);
    const Eigen::Matrix<double, 6, 6> jtj = j.transpose() * j;
    const Params grad = j.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix<double, 6, 6> lhs = jtj;
      lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Params step = lhs.ldlt().solve(-grad);
      const Params trial = p + step;
      if (step.allFinite() && prob.in_bounds(trial)) {
        const Eigen::VectorXd r_trial = prob.residual(trial);
        const double sse_trial = r_trial.squaredNorm();
        if (sse_trial <= sse) {
          const double improvement = sse > 0 ? (sse - sse_trial) / sse : 0.0;
          p = trial;
          r = r_trial;
          sse = sse_trial;
          lambda = std::max(lambda / 10.0, 1e-15);
          accepted = true;
          if (improvement < opts.tolerance) stationary = true;
          continue;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e12) {
        // No descent step exists at this damping: the point is stationary.
        stationary = true;
        break;
      }
    }
  }

  if (p[1] > p[4]) {
    std::swap(p[0], p[3]);
    std::swap(p[1], p[4]);
    std::swap(p[2], p[5]);
  }
  fit.a1 = p[0];
  fit.mu1 = p[1];
  fit.sigma1 = p[2];
  fit.a2 = p[3];
  fit.mu2 = p[4];
  fit.sigma2 = p[5];
  fit.iterations = it;
  const double total = prob.y.squaredNorm();
  fit.residual = total > 0 ? sse / total : 0.0;

  const double edge = 1e-6 * range;
  const bool at_bound = std::min({fit.sigma1 - prob.sigma_lo, fit.sigma2 - prob.sigma_lo,
                                  prob.sigma_hi - fit.sigma1, prob.sigma_hi - fit.sigma2}) < edge;
  const double weight = std::min(fit.a1, fit.a2) / (fit.a1 + fit.a2);
  if (!stationary) {
    fit.note = "iteration limit reached";
  } else if (at_bound) {
    fit.note = kPinnedNote;
  } else if (weight < opts.min_weight_fraction) {
    fit.note = "one component carries negligible weight";
  } else {
    fit.converged = true;
  }
  return fit;
}

double fom(double mu1, double sigma1, double mu2, double sigma2) {
  if (!(sigma1 > 0 && sigma2 > 0)) throw DataError("FOM needs positive widths");
  return std::abs(mu1 - mu2) / (kFwhmPerSigma * (sigma1 + sigma2));
}

FomResult fom(const GaussianPairFit& fit) {
  FomResult out;
  if (!fit.converged) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.reason = fit.note.empty() ? "fit did not converge" : fit.note;
    return out;
  }
  out.value = fom(fit.mu1, fit.sigma1, fit.mu2, fit.sigma2);
  out.failed = out.value < kFailedFom;
  if (out.failed) out.reason = "FOM below 0.5";
  return out;
}

FomAnalysis analyze_fom(const Eigen::VectorXd& factors, const GaussianFitOptions& opts) {
  FomAnalysis a;
  try {
    a.histogram = make_histogram(factors);
  } catch (const DataError& e) {
    a.fom.value = std::numeric_limits<double>::quiet_NaN();
    a.fom.reason = e.what();
    a.fit.note = e.what();
    return a;
  }
  a.fit = fit_two_gaussians(a.histogram, opts);
  // A peak narrower than half a bin pins sigma at its lower bound; refine the
  // binning (still capped at 500) before giving up on the fit.
  std::size_t bins = a.histogram.bins();
  while (!a.fit.converged && a.fit.note == kPinnedNote && bins < 500) {
    bins = std::min<std::size_t>(500, bins * 2);
    Histogram h = make_histogram(factors, bins);
    GaussianPairFit f = fit_two_gaussians(h, opts);
    a.histogram = std::move(h);
    a.fit = std::move(f);
  }
  a.fom = fom(a.fit);
  return a;
}

}  // namespace psd

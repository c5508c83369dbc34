#pragma once

#include <string>

#include "psd/histogram.hpp"

namespace psd {

/// Two-component Gaussian fit to histogram counts. Each component is
/// A * N(x; mu, sigma) evaluated at bin centers, so A is in counts x bin width.
struct GaussianPairFit {
  double mu1 = 0, sigma1 = 1, a1 = 0;
  double mu2 = 0, sigma2 = 1, a2 = 0;
  bool converged = false;
  double residual = 0;  ///< final sum of squares over sum of squared counts
  int iterations = 0;
  std::string note;     ///< why the fit was not converged, empty otherwise
};

struct GaussianFitOptions {
  int max_iterations = 500;
  double initial_damping = 1e-3;
  double tolerance = 1e-9;          ///< relative SSE improvement counted as stationary
  double min_peak_ratio = 0.05;     ///< second smoothed peak vs the first
  double valley_ratio = 0.9;        ///< valley must dip below this fraction of the second peak
  double min_weight_fraction = 0.01;
};

GaussianPairFit fit_two_gaussians(const Histogram& hist, const GaussianFitOptions& opts = {});

/// |mu1 - mu2| / (2 sqrt(2 ln 2) (sigma1 + sigma2)).
double fom(double mu1, double sigma1, double mu2, double sigma2);

constexpr double kFailedFom = 0.5;

struct FomResult {
  double value = 0;  ///< NaN when no converged fit exists
  bool failed = true;
  std::string reason;
};

/// Failed when the fit did not converge or the FOM is below 0.5.
FomResult fom(const GaussianPairFit& fit);

/// Histogram + fit + FOM in one call; never throws for degenerate factor
/// distributions, those come back Failed.
struct FomAnalysis {
  Histogram histogram;
  GaussianPairFit fit;
  FomResult fom;
};
FomAnalysis analyze_fom(const Eigen::VectorXd& factors, const GaussianFitOptions& opts = {});

}  // namespace psd

#pragma once

#include <filesystem>
#include <string>

#include "psd/gaussian_fit.hpp"
#include "psd/metrics.hpp"

namespace psd {

/// "bin_center,count" rows.
std::string histogram_csv(const Histogram& hist);
/// "fpr,tpr" rows.
std::string roc_csv(const RocCurve& roc);

/// Bar chart of the counts; the fitted two-Gaussian curve is overlaid when
/// the fit converged.
std::string histogram_svg(const Histogram& hist, const GaussianPairFit* fit, const std::string& title);
std::string roc_svg(const RocCurve& roc, const std::string& title);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace psd

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psd/freq_domain.hpp"
#include "psd/io.hpp"
#include "psd/pulse.hpp"
#include "psd/spiking.hpp"
#include "psd/time_domain.hpp"

namespace psd {

/// The 21 statistical discriminator ids in canonical report order.
const std::vector<std::string>& statistical_method_ids();
bool is_statistical_method(std::string_view id);

struct MethodParams {
  GateConfig gates;
  double feps_upper = 0.6;
  double feps_lower = 0.1;
  double llr_epsilon = 1e-6;
  Eigen::Index pga_delta = 16;
  double zc_a = 0.95;
  int zc_stages = 3;
  double zc_start_fraction = 0.1;
  FgaVariant fga_variant = FgaVariant::Literal;
  double fs_a = 1.0;
  double fs_b = 1.0;
  double wt1_s1 = 28;
  double wt1_s2 = 40;
  double wt2_scale = 4;
  double sd_threshold = 0.3;
  double sd_min_difference = 0.5;
  int sd_scale_count = 50;
  double sd_scale_lo = 1;
  double sd_scale_hi = 64;
  std::size_t reference_limit = 2000;  ///< pulses per class used for SD masks
  int lg_m = 1;
  SnnConfig pcnn = SnnConfig::defaults(SnnModel::Pcnn);
  SnnConfig scm = SnnConfig::defaults(SnnModel::Scm);
  SnnConfig qcscm = SnnConfig::defaults(SnnModel::Qcscm);
  SnnConfig rcnn = SnnConfig::defaults(SnnModel::Rcnn);

  /// Reads [gates], [feps], [pga], [zc], [fga], [fs], [wt1], [wt2], [sd], [lg],
  /// [pcnn], [scm], [qcscm], [rcnn] sections; absent keys keep defaults.
  static MethodParams from_config(const KeyValueConfig& cfg);
};

/// Unlabeled training data gets class labels from the CC factor: threshold
/// between the two fitted Gaussians weighted by their widths, or the median
/// when the fit fails. Pulses with an undefined CC factor are left out.
struct PseudoLabels {
  std::vector<std::size_t> indices;
  std::vector<Label> labels;
  double threshold = 0;
  bool from_fit = false;
};
PseudoLabels pseudo_labels(const Dataset& ds, const MethodParams& params);

/// A statistical method with whatever it learned from training pulses
/// (reference pulses, PMFs, principal axis, scalogram mask).
class Discriminator {
 public:
  const std::string& id() const { return id_; }
  /// Throws psd::Error when the pulse is outside the method's domain.
  double factor(const Pulse& pulse) const;
  bool used_pseudo_labels() const { return pseudo_; }

 private:
  friend Discriminator fit_discriminator(const std::string& id, const MethodParams& params,
                                         const Dataset& training, std::uint64_t seed);
  std::string id_;
  MethodParams params_;
  std::uint64_t seed_ = 0;
  Eigen::VectorXd weights_;
  std::shared_ptr<const ScalogramMask> mask_;
  bool pseudo_ = false;
};

/// Uses training labels when present, pseudo labels otherwise. Throws
/// ConfigError for unknown ids and DataError when fitting is impossible.
Discriminator fit_discriminator(const std::string& id, const MethodParams& params,
                                const Dataset& training, std::uint64_t seed);

/// One factor per pulse; pulses the method cannot handle get NaN.
FactorSeries compute_factors(const Discriminator& method, const Dataset& ds);

/// Runs fn(i) for i in [0, n) on the available hardware threads. Each index
/// must write only its own output slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace psd

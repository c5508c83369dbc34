#include "psd/methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "psd/error.hpp"
#include "psd/gaussian_fit.hpp"
#include "psd/preprocess.hpp"
#include "psd/rng.hpp"

namespace psd {

const std::vector<std::string>& statistical_method_ids() {
  static const std::vector<std::string> ids = {
      "CC",  "CI", "FEPS", "GP", "LLR", "LMT",  "PCA", "PGA",  "PR",   "ZC",  "DFT",
      "FGA", "FS", "SD",   "SDCC", "WT1", "WT2", "LG",  "PCNN", "RCNN", "SCM"};
  return ids;
}

bool is_statistical_method(std::string_view id) {
  const auto& ids = statistical_method_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

MethodParams MethodParams::from_config(const KeyValueConfig& cfg) {
  MethodParams p;
  p.gates.t_pre = cfg.get_int("gates.t_pre", p.gates.t_pre);
  p.gates.t_short = cfg.get_int("gates.t_short", p.gates.t_short);
  p.gates.t_long = cfg.get_int("gates.t_long", p.gates.t_long);
  p.gates.t_delay = cfg.get_int("gates.t_delay", p.gates.t_delay);
  p.gates.t_total = cfg.get_int("gates.t_total", p.gates.t_total);
  p.gates.validate();
  p.feps_upper = cfg.get_double("feps.upper", p.feps_upper);
  p.feps_lower = cfg.get_double("feps.lower", p.feps_lower);
  if (!(0 < p.feps_lower && p.feps_lower < p.feps_upper && p.feps_upper < 1)) {
    throw ConfigError("feps levels need 0 < lower < upper < 1");
  }
  p.llr_epsilon = cfg.get_double("llr.epsilon", p.llr_epsilon);
  p.pga_delta = cfg.get_int("pga.delta", p.pga_delta);
  if (p.pga_delta < 1) throw ConfigError("pga.delta must be positive");
  p.zc_a = cfg.get_double("zc.a", p.zc_a);
  p.zc_stages = static_cast<int>(cfg.get_int("zc.stages", p.zc_stages));
  p.zc_start_fraction = cfg.get_double("zc.start_fraction", p.zc_start_fraction);
  const std::string fga = cfg.get_string("fga.variant", "literal");
  if (fga == "literal") {
    p.fga_variant = FgaVariant::Literal;
  } else if (fga == "magnitude") {
    p.fga_variant = FgaVariant::Magnitude;
  } else {
    throw ConfigError("fga.variant must be literal or magnitude");
  }
  p.fs_a = cfg.get_double("fs.a", p.fs_a);
  p.fs_b = cfg.get_double("fs.b", p.fs_b);
  p.wt1_s1 = cfg.get_double("wt1.s1", p.wt1_s1);
  p.wt1_s2 = cfg.get_double("wt1.s2", p.wt1_s2);
  p.wt2_scale = cfg.get_double("wt2.scale", p.wt2_scale);
  p.sd_threshold = cfg.get_double("sd.threshold", p.sd_threshold);
  p.sd_min_difference = cfg.get_double("sd.min_difference", p.sd_min_difference);
  p.sd_scale_count = static_cast<int>(cfg.get_int("sd.scales", p.sd_scale_count));
  p.sd_scale_lo = cfg.get_double("sd.scale_lo", p.sd_scale_lo);
  p.sd_scale_hi = cfg.get_double("sd.scale_hi", p.sd_scale_hi);
  p.reference_limit = static_cast<std::size_t>(
      cfg.get_int("sd.reference_limit", static_cast<long long>(p.reference_limit)));
  if (!(0 < p.sd_threshold && p.sd_threshold < 1)) throw ConfigError("sd.threshold must lie in (0,1)");
  p.lg_m = static_cast<int>(cfg.get_int("lg.m", p.lg_m));
  if (p.lg_m < 1) throw ConfigError("lg.m must be >= 1");
  p.pcnn = SnnConfig::from_config(cfg.section("pcnn"), p.pcnn);
  p.scm = SnnConfig::from_config(cfg.section("scm"), p.scm);
  p.qcscm = SnnConfig::from_config(cfg.section("qcscm"), p.qcscm);
  p.rcnn = SnnConfig::from_config(cfg.section("rcnn"), p.rcnn);
  return p;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

PseudoLabels pseudo_labels(const Dataset& ds, const MethodParams& params) {
  std::vector<double> cc(ds.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(ds.size(), [&](std::size_t i) {
    try {
      cc[i] = cc_factor(ds.pulses[i].samples, params.gates);
    } catch (const Error&) {
    }
  });
  PseudoLabels out;
  std::vector<double> finite;
  for (std::size_t i = 0; i < cc.size(); ++i) {
    if (std::isfinite(cc[i])) {
      out.indices.push_back(i);
      finite.push_back(cc[i]);
    }
  }
  if (finite.size() < 2) throw DataError("pseudo labels: fewer than two pulses with a CC factor");
  const Eigen::Map<const Eigen::VectorXd> values(finite.data(), static_cast<Eigen::Index>(finite.size()));
  const FomAnalysis a = analyze_fom(values);
  if (a.fit.converged) {
    const auto& f = a.fit;
    out.threshold = f.mu1 + (f.mu2 - f.mu1) * f.sigma1 / (f.sigma1 + f.sigma2);
    out.from_fit = true;
  } else {
    std::vector<double> sorted = finite;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    out.threshold = sorted[sorted.size() / 2];
  }
  for (double v : finite) out.labels.push_back(v > out.threshold ? Label::Neutron : Label::Gamma);
  const auto n = std::count(out.labels.begin(), out.labels.end(), Label::Neutron);
  if (n == 0 || n == static_cast<std::ptrdiff_t>(out.labels.size())) {
    throw DataError("pseudo labels: CC threshold leaves one class empty");
  }
  return out;
}

namespace {

bool needs_references(const std::string& id) { return id == "GP" || id == "LLR" || id == "PR" || id == "SD"; }

Dataset class_subset(const Dataset& ds, const std::vector<Label>& labels, Label which, std::size_t limit) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size() && idx.size() < limit; ++i) {
    if (labels[i] == which) idx.push_back(i);
  }
  return ds.subset(idx);
}

}  // namespace

Discriminator fit_discriminator(const std::string& id, const MethodParams& params, const Dataset& training,
                                std::uint64_t seed) {
  if (!is_statistical_method(id)) throw ConfigError("unknown statistical method id: " + id);
  Discriminator d;
  d.id_ = id;
  d.params_ = params;
  d.seed_ = derive_seed(seed, id);
  if (id == "PCA") {
    d.weights_ = pca_fit(training).w;
    return d;
  }
  if (!needs_references(id)) return d;

  if (training.empty()) throw DataError(id + ": empty training set");
  Dataset labeled;
  std::vector<Label> labels;
  if (training.labeled()) {
    labeled = training;
    labels = *training.labels;
  } else {
    const PseudoLabels pl = pseudo_labels(training, params);
    labeled = training.subset(pl.indices);
    labels = pl.labels;
    d.pseudo_ = true;
  }
  if (id == "GP") {
    d.weights_ = gatti_weights(build_references(labeled, labels));
  } else if (id == "LLR") {
    d.weights_ = llr_weights(build_pmf(labeled, labels, params.llr_epsilon));
  } else if (id == "PR") {
    d.weights_ = build_references(labeled, labels).v_gamma;
  } else {
    const Dataset n = class_subset(labeled, labels, Label::Neutron, params.reference_limit);
    const Dataset g = class_subset(labeled, labels, Label::Gamma, params.reference_limit);
    d.mask_ = std::make_shared<const ScalogramMask>(build_scalogram_mask(
        n, g, params.sd_threshold, log_scales(params.sd_scale_count, params.sd_scale_lo, params.sd_scale_hi),
        params.sd_min_difference));
  }
  return d;
}

double Discriminator::factor(const Pulse& pulse) const {
  const Eigen::VectorXd& v = pulse.samples;
  const MethodParams& p = params_;
  if (id_ == "CC") return cc_factor(v, p.gates);
  if (id_ == "CI") return ci_factor(v, p.gates);
  if (id_ == "FEPS") return feps_factor(v, p.feps_upper, p.feps_lower);
  if (id_ == "GP") return gatti_factor(v, weights_);
  if (id_ == "LLR") return llr_factor(v, weights_);
  if (id_ == "LMT") return lmt_factor(v);
  if (id_ == "PCA") return pca_factor(v, PrincipalComponent{weights_, 0.0, 0});
  if (id_ == "PGA") return pga_factor(v, p.pga_delta);
  if (id_ == "PR") return pr_factor(v, weights_);
  if (id_ == "ZC") return zc_factor_for_pulse(v, p.zc_a, p.zc_stages, p.zc_start_fraction);
  if (id_ == "DFT") return dft_factor(v);
  if (id_ == "FGA") return fga_factor(v, pulse.sample_rate(), p.fga_variant);
  if (id_ == "FS") return fs_factor(periodogram(v, pulse.dt), p.fs_a, p.fs_b);
  if (id_ == "SD") return sd_factor(v, *mask_);
  if (id_ == "SDCC") return sdcc_factor(v);
  if (id_ == "WT1") return wt1_factor(v, p.wt1_s1, p.wt1_s2);
  if (id_ == "WT2") return wt2_factor(v, p.wt2_scale);
  if (id_ == "LG") return lg_factor(run_snn(v, SnnModel::Qcscm, p.qcscm), peak_index(v), p.lg_m);
  if (id_ == "PCNN") return pcnn_factor(run_snn(v, SnnModel::Pcnn, p.pcnn));
  if (id_ == "SCM") return scm_factor(run_snn(v, SnnModel::Scm, p.scm));
  if (id_ == "RCNN") {
    SnnConfig cfg = p.rcnn;
    // Per-pulse stream so results do not depend on evaluation order.
    cfg.rng_seed = splitmix64(seed_ ^ cfg.rng_seed ^ static_cast<std::uint64_t>(pulse.id));
    return rcnn_factor(run_snn(v, SnnModel::Rcnn, cfg));
  }
  throw ConfigError("unknown statistical method id: " + id_);
}

FactorSeries compute_factors(const Discriminator& method, const Dataset& ds) {
  FactorSeries out;
  out.method = method.id();
  out.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(ds.size()),
                                         std::numeric_limits<double>::quiet_NaN());
  parallel_for(ds.size(), [&](std::size_t i) {
    try {
      const double f = method.factor(ds.pulses[i]);
      if (std::isfinite(f)) out.values[static_cast<Eigen::Index>(i)] = f;
    } catch (const Error&) {
    }
  });
  return out;
}

}  // namespace psd

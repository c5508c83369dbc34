#include "psd/synth.hpp"

#include <cmath>

#include "psd/error.hpp"
#include "psd/rng.hpp"

namespace psd {

void SynthParams::validate() const {
  if (!(tau_rise > 0 && tau_fast > 0 && tau_slow > 0)) {
    throw ConfigError("synthetic time constants must be positive");
  }
  if (!(tau_fast < tau_slow)) throw ConfigError("tau_fast must be smaller than tau_slow");
  if (!(tail_ratio >= 0)) throw ConfigError("tail_ratio must be >= 0");
  if (!(amplitude_range.first <= amplitude_range.second)) {
    throw ConfigError("amplitude_min must not exceed amplitude_max");
  }
  if (!(noise_sigma >= 0)) throw ConfigError("noise_sigma must be >= 0");
  if (length < 1) throw ConfigError("synthetic length must be positive");
  if (onset < 0 || onset >= length) throw ConfigError("onset must lie within the pulse");
  if (!(dt > 0)) throw ConfigError("dt must be positive");
}

Eigen::VectorXd SynthParams::shape(double amplitude) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(length);
  for (Eigen::Index i = onset; i < length; ++i) {
    const double t = static_cast<double>(i - onset);
    v[i] = amplitude * (std::exp(-t / tau_fast) + tail_ratio * std::exp(-t / tau_slow)) *
           (1.0 - std::exp(-t / tau_rise));
  }
  return v;
}

SynthParams SynthParams::from_config(const KeyValueConfig& cfg, const SynthParams& defaults) {
  SynthParams p = defaults;
  p.tau_rise = cfg.get_double("tau_rise", p.tau_rise);
  p.tau_fast = cfg.get_double("tau_fast", p.tau_fast);
  p.tau_slow = cfg.get_double("tau_slow", p.tau_slow);
  p.tail_ratio = cfg.get_double("tail_ratio", p.tail_ratio);
  p.amplitude_range.first = cfg.get_double("amplitude_min", p.amplitude_range.first);
  p.amplitude_range.second = cfg.get_double("amplitude_max", p.amplitude_range.second);
  p.noise_sigma = cfg.get_double("noise_sigma", p.noise_sigma);
  p.length = cfg.get_int("length", p.length);
  p.onset = cfg.get_int("onset", p.onset);
  p.dt = cfg.get_double("dt", p.dt);
  p.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(p.seed)));
  p.validate();
  return p;
}

// Calibrated with tools/calibrate.cpp against the synthetic-separation
// targets documented in the README.
SynthParams default_neutron_params() {
  SynthParams p;
  p.tau_rise = 1.0;
  p.tau_fast = 4.0;
  p.tau_slow = 35.0;
  p.tail_ratio = 0.35;
  p.amplitude_range = {0.2, 1.0};
  p.noise_sigma = 0.01;
  p.length = 256;
  p.onset = 30;
  p.seed = 1;
  return p;
}

SynthParams default_gamma_params() {
  SynthParams p = default_neutron_params();
  p.tail_ratio = 0.10;
  p.seed = 2;
  return p;
}

namespace {

Pulse draw_pulse(const SynthParams& p, Rng& rng) {
  const double a = rng.uniform(p.amplitude_range.first, p.amplitude_range.second);
  Pulse pulse;
  pulse.dt = p.dt;
  pulse.samples = p.shape(a);
  if (p.noise_sigma > 0) {
    for (Eigen::Index i = 0; i < pulse.samples.size(); ++i) {
      pulse.samples[i] += p.noise_sigma * a * rng.normal();
    }
  }
  return pulse;
}

}  // namespace

Dataset synthesize_dataset(std::size_t n_neutron, std::size_t n_gamma, const SynthParams& neutron,
                           const SynthParams& gamma) {
  neutron.validate();
  gamma.validate();
  if (neutron.length != gamma.length) throw ConfigError("class presets must share one length");

  std::vector<Label> order(n_neutron, Label::Neutron);
  order.insert(order.end(), n_gamma, Label::Gamma);
  Rng mixer(splitmix64(neutron.seed * 0x9e3779b97f4a7c15ULL ^ gamma.seed));
  mixer.shuffle(order);

  Rng rng_n(neutron.seed);
  Rng rng_g(gamma.seed);
  Dataset ds;
  ds.source = "synthetic";
  ds.pulses.reserve(order.size());
  ds.labels.emplace();
  ds.labels->reserve(order.size());
  for (Label l : order) {
    Pulse p = l == Label::Neutron ? draw_pulse(neutron, rng_n) : draw_pulse(gamma, rng_g);
    p.id = static_cast<std::int64_t>(ds.pulses.size());
    ds.pulses.push_back(std::move(p));
    ds.labels->push_back(l);
  }
  return ds;
}

}  // namespace psd

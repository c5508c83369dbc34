#include "psd/spiking.hpp"

#include <algorithm>
#include <map>

#include "psd/error.hpp"
#include "psd/rng.hpp"

namespace psd {

void SnnConfig::validate() const {
  if (iterations < 1 || iterations > 10000) throw ConfigError("SNN iterations must lie in [1, 10000]");
  if (!(step > 0 && step <= 1)) throw ConfigError("SNN step must lie in (0, 1]");
  for (double d : {f, l, g}) {
    if (!(d > 0 && d < 1)) throw ConfigError("SNN decay factors must lie in (0, 1)");
  }
  if (!(beta >= 0)) throw ConfigError("SNN linking strength must be >= 0");
  if (!(v_f >= 0 && v_l >= 0)) throw ConfigError("SNN coupling gains must be >= 0");
  if (!(v_theta > 0)) throw ConfigError("SNN threshold magnitude must be positive");
  if (kernel.empty() || kernel.size() % 2 == 0) throw ConfigError("SNN kernel must have odd length");
}

SnnConfig SnnConfig::defaults(SnnModel model) {
  SnnConfig c;
  if (model == SnnModel::Qcscm) {
    c.step = 0.25;
    c.iterations = 160;
  }
  return c;
}

SnnConfig SnnConfig::from_config(const KeyValueConfig& cfg, const SnnConfig& d) {
  SnnConfig c = d;
  c.iterations = static_cast<int>(cfg.get_int("iterations", c.iterations));
  c.step = cfg.get_double("step", c.step);
  c.f = cfg.get_double("f", c.f);
  c.l = cfg.get_double("l", c.l);
  c.g = cfg.get_double("g", c.g);
  c.beta = cfg.get_double("beta", c.beta);
  c.v_f = cfg.get_double("v_f", c.v_f);
  c.v_l = cfg.get_double("v_l", c.v_l);
  c.v_theta = cfg.get_double("v_theta", c.v_theta);
  c.kernel = cfg.get_doubles("kernel", c.kernel);
  c.rng_seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(c.rng_seed)));
  c.validate();
  return c;
}

long long IgnitionMap::total() const {
  long long s = 0;
  for (int c : counts) s += c;
  return s;
}

namespace {

// (K * Y)[i] = sum_j K[j] Y[i + j - r], zero outside the pulse.
void couple(const std::vector<double>& kernel, const std::vector<unsigned char>& y,
            std::vector<double>& out) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
  const auto r = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(kernel.size()); ++j) {
      const std::ptrdiff_t k = i + j - r;
      if (k >= 0 && k < n && y[static_cast<std::size_t>(k)]) acc += kernel[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
}

}  // namespace

IgnitionMap run_snn(const Eigen::VectorXd& pulse, SnnModel model, const SnnConfig& cfg) {
  cfg.validate();
  if (model != SnnModel::Qcscm && cfg.step != 1.0) {
    throw ConfigError("fractional steps are specific to the quasi-continuous SCM");
  }
  const auto n = static_cast<std::size_t>(pulse.size());
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::max(pulse[static_cast<Eigen::Index>(i)], 0.0);

  std::vector<double> feed(n, 0.0), link(n, 0.0), theta(n, cfg.v_theta), coupling(n, 0.0);
  std::vector<unsigned char> fired(n, 0);
  std::vector<double> kernel = cfg.kernel;
  const std::size_t center = kernel.size() / 2;
  Rng rng(cfg.rng_seed);
  IgnitionMap map;
  map.counts.assign(n, 0);

  const double theta_decay = model == SnnModel::Qcscm ? 1.0 - cfg.step * (1.0 - cfg.g) : cfg.g;
  for (int it = 0; it < cfg.iterations; ++it) {
    if (model == SnnModel::Rcnn) {
      double sum = 0.0;
      for (std::size_t j = 0; j < kernel.size(); ++j) {
        kernel[j] = j == center ? 0.0 : rng.uniform();
        sum += kernel[j];
      }
      if (sum > 0) {
        for (double& k : kernel) k /= sum;
      }
    }
    couple(kernel, fired, coupling);
    for (std::size_t i = 0; i < n; ++i) {
      double u = 0.0;
      switch (model) {
        case SnnModel::Pcnn:
        case SnnModel::Rcnn:
          feed[i] = cfg.f * feed[i] + cfg.v_f * coupling[i] + s[i];
          link[i] = cfg.l * link[i] + cfg.v_l * coupling[i];
          u = feed[i] * (1.0 + cfg.beta * link[i]);
          break;
        case SnnModel::Scm:
          feed[i] = cfg.f * feed[i] + s[i] * coupling[i] + s[i];
          u = feed[i];
          break;
        case SnnModel::Qcscm:
          feed[i] += cfg.step * ((cfg.f - 1.0) * feed[i] + s[i] * coupling[i] + s[i]);
          u = feed[i];
          break;
      }
      fired[i] = u > theta[i] ? 1 : 0;
      theta[i] = theta_decay * theta[i] + cfg.v_theta * fired[i];
      map.counts[i] += fired[i];
    }
  }
  return map;
}

double ignition_sum(const IgnitionMap& map) { return static_cast<double>(map.total()); }

int ignition_mode(const IgnitionMap& map) {
  if (map.counts.empty()) throw DataError("empty ignition map");
  std::map<int, int> freq;
  for (int c : map.counts) ++freq[c];
  int best = freq.begin()->first, best_n = 0;
  for (const auto& [value, n] : freq) {  // ascending values: strict > keeps the smallest on ties
    if (n > best_n) {
      best = value;
      best_n = n;
    }
  }
  return best;
}

double lg_factor(const IgnitionMap& map, Eigen::Index t_max, int m) {
  if (t_max < 0 || static_cast<std::size_t>(t_max) >= map.size()) {
    throw DataError("LG: t_max outside the ignition map");
  }
  if (m < 1) throw ConfigError("LG: m must be >= 1");
  const int mode = ignition_mode(map);
  int seen = 0;
  for (std::size_t t = static_cast<std::size_t>(t_max) + 1; t < map.size(); ++t) {
    if (map.counts[t] == mode && ++seen == m) {
      const double num = map.counts[static_cast<std::size_t>(t_max)] - map.counts[t];
      return num / (static_cast<double>(t_max) - static_cast<double>(t));
    }
  }
  throw DataError("LG: fewer than m mode-valued samples after t_max");
}

}  // namespace psd

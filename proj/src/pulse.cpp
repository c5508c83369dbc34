#include "psd/pulse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "psd/error.hpp"

namespace psd {

Label parse_label(std::string_view token) {
  std::string t;
  for (char c : token) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (t == "n" || t == "neutron") return Label::Neutron;
  if (t == "g" || t == "gamma") return Label::Gamma;
  throw DataError("unrecognized label token '" + std::string(token) + "'");
}

std::string_view label_name(Label label) {
  return label == Label::Neutron ? "n" : "g";
}

void Pulse::validate() const {
  if (samples.size() == 0) throw DataError("pulse " + std::to_string(id) + " is empty");
  if (!samples.allFinite()) {
    throw DataError("pulse " + std::to_string(id) + " has non-finite samples");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DataError("pulse " + std::to_string(id) + " has non-positive sample period");
  }
}

Eigen::Index FactorSeries::invalid_count() const {
  return std::count_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); });
}

Eigen::VectorXd FactorSeries::finite_values() const {
  Eigen::VectorXd out(values.size() - invalid_count());
  Eigen::Index j = 0;
  for (double v : values) {
    if (std::isfinite(v)) out[j++] = v;
  }
  return out;
}

void Dataset::validate() const {
  const Eigen::Index n = length();
  for (const auto& p : pulses) {
    p.validate();
    if (p.size() != n) {
      throw DataError("pulse " + std::to_string(p.id) + " has length " +
                      std::to_string(p.size()) + ", expected " + std::to_string(n));
    }
  }
  if (labels && labels->size() != pulses.size()) {
    throw DataError("label count " + std::to_string(labels->size()) +
                    " does not match pulse count " + std::to_string(pulses.size()));
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.source = source;
  out.pulses.reserve(indices.size());
  if (labels) out.labels.emplace().reserve(indices.size());
  for (std::size_t i : indices) {
    out.pulses.push_back(pulses.at(i));
    if (labels) out.labels->push_back(labels->at(i));
  }
  return out;
}

Eigen::MatrixXd Dataset::matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pulses.size()), length());
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = pulses[i].samples.transpose();
  }
  return m;
}

std::size_t Dataset::count(Label label) const {
  if (!labels) return 0;
  return static_cast<std::size_t>(std::count(labels->begin(), labels->end(), label));
}

}  // namespace psd

#include "psd/hybrid.hpp"

#include <cmath>

#include "psd/error.hpp"

namespace psd {

bool is_hybrid_id(std::string_view id) {
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) return false;
  return is_learner_id(id.substr(0, colon)) && is_statistical_method(id.substr(colon + 1));
}

HybridId parse_hybrid_id(std::string_view id) {
  if (!is_hybrid_id(id)) throw ConfigError("invalid hybrid id (expected <learner>:<method>): " + std::string(id));
  const auto colon = id.find(':');
  return {std::string(id.substr(0, colon)), std::string(id.substr(colon + 1))};
}

HybridResult train_hybrid(const LearnerSpec& regressor, const std::string& teacher_id, const MethodParams& params,
                          const Dataset& ds, const SplitSpec& split, std::uint64_t seed) {
  HybridResult r;
  r.split = split_indices(ds, split);
  const Dataset training = ds.subset(r.split.training);
  const Dataset validation = ds.subset(r.split.validation);
  if (training.empty()) throw DataError("hybrid " + regressor.id + ":" + teacher_id + ": empty training split");
  if (validation.empty()) throw DataError("hybrid " + regressor.id + ":" + teacher_id + ": empty validation split");

  const Discriminator teacher = fit_discriminator(teacher_id, params, training, seed);
  const FactorSeries targets = compute_factors(teacher, training);
  if (const auto bad = targets.invalid_count(); bad > 0) {
    throw DataError("teacher " + teacher_id + " produced " + std::to_string(bad) +
                    " undefined factors on the training split");
  }
  r.student = train_regressor(regressor, training, targets.values, seed);
  r.predicted.method = regressor.id + ":" + teacher_id;
  r.predicted.values = r.student.score(validation);
  r.teacher = compute_factors(teacher, validation);
  return r;
}

}  // namespace psd

#pragma once

#include <filesystem>
#include <string>

#include "psd/learners.hpp"

namespace psd {

constexpr int kModelFormatVersion = 1;

/// Versioned JSON document: learner id and hyperparameters, fitted feature
/// state, standardization constants, and the model parameters.
std::string learner_to_json(const TrainedLearner& learner);
TrainedLearner learner_from_json(const std::string& text);

void save_learner(const TrainedLearner& learner, const std::filesystem::path& path);
TrainedLearner load_learner(const std::filesystem::path& path);

}  // namespace psd

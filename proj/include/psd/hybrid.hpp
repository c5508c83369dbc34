#pragma once

#include <string>
#include <string_view>

#include "psd/learners.hpp"
#include "psd/methods.hpp"
#include "psd/split.hpp"

namespace psd {

/// Hybrid ids pair a regressor with a teacher: "<learner>:<method>", e.g.
/// "MLP1:CC" or "MLP3-FT:GP".
struct HybridId {
  std::string learner;
  std::string teacher;
  std::string text() const { return learner + ":" + teacher; }
};

bool is_hybrid_id(std::string_view id);
HybridId parse_hybrid_id(std::string_view id);

struct HybridResult {
  TrainedLearner student;
  FactorSeries predicted;  ///< student output on the validation split
  FactorSeries teacher;    ///< teacher factors on the validation split (NaN where undefined)
  SplitIndices split;
};

/// The teacher is fitted on and applied to the training split; the student
/// regresses those factors from its own features and is evaluated on the
/// validation split. Throws DataError naming the teacher if any training
/// factor is undefined.
HybridResult train_hybrid(const LearnerSpec& regressor, const std::string& teacher_id, const MethodParams& params,
                          const Dataset& ds, const SplitSpec& split, std::uint64_t seed);

}  // namespace psd

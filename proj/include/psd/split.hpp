#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "psd/pulse.hpp"

namespace psd {

/// Fractions are (validation, training, test).
struct SplitSpec {
  double validation = 0.80;
  double training = 0.18;
  double test = 0.02;
  std::uint64_t seed = 0;
  bool stratified = true;

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> validation;
  std::vector<std::size_t> training;
  std::vector<std::size_t> test;
};

struct DatasetSplit {
  Dataset validation;
  Dataset training;
  Dataset test;
};

/// test = round(f_test * n), training = round(f_train * n), validation takes
/// the remainder; in stratified mode the rule is applied per class. Each
/// partition keeps the original dataset order.
SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec);
DatasetSplit split_dataset(const Dataset& ds, const SplitSpec& spec);

}  // namespace psd

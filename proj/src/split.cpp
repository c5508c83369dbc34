#include "psd/split.hpp"

#include <algorithm>
#include <cmath>

#include "psd/error.hpp"
#include "psd/rng.hpp"

namespace psd {

void SplitSpec::validate() const {
  for (double f : {validation, training, test}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split fractions must lie in [0,1]");
  }
  if (std::abs(validation + training + test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

namespace {

void assign(std::vector<std::size_t> pool, const SplitSpec& spec, Rng& rng, SplitIndices& out) {
  rng.shuffle(pool);
  const double n = static_cast<double>(pool.size());
  auto n_test = static_cast<std::size_t>(std::llround(spec.test * n));
  auto n_train = static_cast<std::size_t>(std::llround(spec.training * n));
  n_test = std::min(n_test, pool.size());
  n_train = std::min(n_train, pool.size() - n_test);
  auto it = pool.begin();
  out.test.insert(out.test.end(), it, it + static_cast<std::ptrdiff_t>(n_test));
  it += static_cast<std::ptrdiff_t>(n_test);
  out.training.insert(out.training.end(), it, it + static_cast<std::ptrdiff_t>(n_train));
  it += static_cast<std::ptrdiff_t>(n_train);
  out.validation.insert(out.validation.end(), it, pool.end());
}

}  // namespace

SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec) {
  spec.validate();
  if (spec.stratified && !ds.labeled()) {
    throw ConfigError("stratified split requested on unlabeled data");
  }
  Rng rng(spec.seed);
  SplitIndices out;
  if (spec.stratified) {
    for (Label cls : {Label::Gamma, Label::Neutron}) {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if ((*ds.labels)[i] == cls) pool.push_back(i);
      }
      assign(std::move(pool), spec, rng, out);
    }
  } else {
    std::vector<std::size_t> pool(ds.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    assign(std::move(pool), spec, rng, out);
  }
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.training.begin(), out.training.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

DatasetSplit split_dataset(const Dataset& ds, const SplitSpec& spec) {
  const auto idx = split_indices(ds, spec);
  return {ds.subset(idx.validation), ds.subset(idx.training), ds.subset(idx.test)};
}

}  // namespace psd

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "limo/data.hpp"
#include "limo/random.hpp"

namespace limo {

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Fisher-Yates permutation of 0..m-1 driven by the split substream of `seed`.
inline std::vector<Index> seeded_permutation(Index m, std::uint64_t seed) {
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = Rng::substream(seed, Stream::split);
  for (Index k = m; k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  return perm;
}

inline SplitIndices split_indices(Index m, const SplitSpec& plan) {
  detail::require(plan.train_fraction > 0.0 && plan.train_fraction < 1.0,
                  "train fraction must lie in (0, 1)");
  const auto train_size = static_cast<Index>(std::llround(plan.train_fraction * static_cast<double>(m)));
  detail::require(train_size >= 1 && train_size < m,
                  "split of " + std::to_string(m) + " rows leaves an empty part");
  auto perm = seeded_permutation(m, plan.seed);
  SplitIndices out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_size));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_size), perm.end());
  return out;
}

inline std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& plan) {
  auto idx = split_indices(data.instances(), plan);
  return {data.select_rows(idx.train), data.select_rows(idx.test)};
}

}  // namespace limo

#pragma once

// Four-label quadrant dataset on the open square (-1, 1)^2.
//
//        y
//        |
//   {A}  |  {A,B}
//  ------+------ x
//  {B,C} | {A,B,D}
//        |
//
// Label A covers three quadrants, so it is not linearly separable from its
// complement; the number of co-occurring labels ranges from 1 to 3.

#include <array>
#include <cstdint>
#include <vector>

#include "limo/data.hpp"
#include "limo/random.hpp"

namespace limo {

inline constexpr std::array<const char*, 4> quadrant_label_names{"A", "B", "C", "D"};

/// Label vector (A, B, C, D) of a point with non-zero coordinates.
inline std::array<std::uint8_t, 4> quadrant_labels(double x, double y) {
  if (x < 0 && y > 0) return {1, 0, 0, 0};
  if (x > 0 && y > 0) return {1, 1, 0, 0};
  if (x < 0 && y < 0) return {0, 1, 1, 0};
  return {1, 1, 0, 1};
}

inline Dataset synth_quadrant(std::size_t n, std::uint64_t seed) {
  detail::require(n >= 4, "synth_quadrant needs at least 4 points");
  constexpr int max_attempts = 1000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng = Rng::substream(seed, Stream::synth, static_cast<std::uint64_t>(attempt));
    auto coordinate = [&rng] {
      double v;
      do v = rng.uniform(-1.0, 1.0);
      while (v == 0.0 || v == -1.0);
      return v;
    };
    Matrix x(n, 2);
    std::vector<std::uint8_t> bits;
    bits.reserve(n * 4);
    std::array<std::size_t, 4> positives{};
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = coordinate();
      x(i, 1) = coordinate();
      auto y = quadrant_labels(x(i, 0), x(i, 1));
      for (int j = 0; j < 4; ++j) {
        bits.push_back(y[j]);
        positives[j] += y[j];
      }
    }
    bool mixed = true;
    for (auto p : positives) mixed = mixed && p > 0 && p < n;
    if (mixed) return Dataset(FeatureMatrix(std::move(x)), LabelMatrix(n, 4, std::move(bits)));
  }
  throw ArgumentError("synth_quadrant could not draw every label with both classes");
}

}  // namespace limo

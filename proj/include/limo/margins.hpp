#pragma once

// Label-wise and instance-wise margins, effectiveness predicates, threshold
// error, and score constructors with known effectiveness.
//
// gamma_label(i) = min over (u relevant, v irrelevant) of f_u(x_i) - f_v(x_i)
// gamma_inst(j)  = min over (a positive, b negative) of f_j(x_a) - f_j(x_b)
//
// A predictor is effective when every defined margin of the given kind is
// strictly positive; rows/columns without pairs impose no constraint.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "limo/data.hpp"
#include "limo/random.hpp"

namespace limo {

inline std::optional<double> label_wise_margin(const ScoreMatrix& f, const LabelMatrix& y, Index i) {
  require_same_shape(f, y);
  detail::require(i < y.rows(), "label_wise_margin: row out of range");
  if (y.row_pairs(i) == 0) return std::nullopt;
  double lowest_relevant = std::numeric_limits<double>::infinity();
  double highest_irrelevant = -std::numeric_limits<double>::infinity();
  for (auto u : y.positives(i)) lowest_relevant = std::min(lowest_relevant, f(i, u));
  for (auto v : y.negatives(i)) highest_irrelevant = std::max(highest_irrelevant, f(i, v));
  return lowest_relevant - highest_irrelevant;
}

inline std::optional<double> instance_wise_margin(const ScoreMatrix& f, const LabelMatrix& y, Index j) {
  require_same_shape(f, y);
  detail::require(j < y.cols(), "instance_wise_margin: column out of range");
  if (y.column_pairs(j) == 0) return std::nullopt;
  double lowest_positive = std::numeric_limits<double>::infinity();
  double highest_negative = -std::numeric_limits<double>::infinity();
  for (auto a : y.column_positives(j)) lowest_positive = std::min(lowest_positive, f(a, j));
  for (auto b : y.column_negatives(j)) highest_negative = std::max(highest_negative, f(b, j));
  return lowest_positive - highest_negative;
}

struct MarginProfile {
  std::vector<std::optional<double>> label_wise;     // one per instance
  std::vector<std::optional<double>> instance_wise;  // one per label
};

inline MarginProfile margin_profile(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  MarginProfile p;
  for (Index i = 0; i < y.rows(); ++i) p.label_wise.push_back(label_wise_margin(f, y, i));
  for (Index j = 0; j < y.cols(); ++j) p.instance_wise.push_back(instance_wise_margin(f, y, j));
  return p;
}

namespace margins_detail {
inline bool all_positive(const std::vector<std::optional<double>>& margins) {
  return std::all_of(margins.begin(), margins.end(), [](const auto& g) { return !g || *g > 0.0; });
}
}  // namespace margins_detail

inline bool is_label_wise_effective(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  for (Index i = 0; i < y.rows(); ++i) {
    auto g = label_wise_margin(f, y, i);
    if (g && !(*g > 0.0)) return false;
  }
  return true;
}

inline bool is_instance_wise_effective(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  for (Index j = 0; j < y.cols(); ++j) {
    auto g = instance_wise_margin(f, y, j);
    if (g && !(*g > 0.0)) return false;
  }
  return true;
}

inline bool is_double_effective(const ScoreMatrix& f, const LabelMatrix& y) {
  return is_label_wise_effective(f, y) && is_instance_wise_effective(f, y);
}

inline nlohmann::ordered_json to_json(const MarginProfile& p) {
  auto list = [](const std::vector<std::optional<double>>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& g : v) arr.push_back(g ? nlohmann::ordered_json(*g) : nlohmann::ordered_json(nullptr));
    return arr;
  };
  nlohmann::ordered_json j;
  j["label_wise"] = list(p.label_wise);
  j["instance_wise"] = list(p.instance_wise);
  j["label_wise_effective"] = margins_detail::all_positive(p.label_wise);
  j["instance_wise_effective"] = margins_detail::all_positive(p.instance_wise);
  j["double_effective"] = margins_detail::all_positive(p.label_wise) && margins_detail::all_positive(p.instance_wise);
  return j;
}

// ---------------------------------------------------------------------------
// Threshold error

/// A strictly descending score sequence, its optimal cut c* in [1, k], and a
/// threshold t in (x_k - 1, x_1 + 1).
class ThresholdErrorCase {
 public:
  ThresholdErrorCase(std::vector<double> ordered_scores, std::size_t optimal_cut, double threshold)
      : scores_(std::move(ordered_scores)), cut_(optimal_cut), threshold_(threshold) {
    detail::require(!scores_.empty(), "threshold error needs at least one score");
    for (std::size_t k = 1; k < scores_.size(); ++k)
      detail::require(scores_[k - 1] > scores_[k], "threshold error scores must be strictly descending");
    detail::require(cut_ >= 1 && cut_ <= scores_.size(), "optimal cut must lie in [1, k]");
    detail::require(threshold_ > scores_.back() - 1.0 && threshold_ < scores_.front() + 1.0,
                    "threshold must lie in (x_k - 1, x_1 + 1)");
  }

  std::span<const double> scores() const { return scores_; }
  std::size_t optimal_cut() const { return cut_; }
  double threshold() const { return threshold_; }

 private:
  std::vector<double> scores_;
  std::size_t cut_;
  double threshold_;
};

/// Number of scores strictly above t.
inline std::size_t cut_above(std::span<const double> scores, double t) {
  return static_cast<std::size_t>(std::count_if(scores.begin(), scores.end(), [t](double s) { return s > t; }));
}

inline std::size_t absolute_difference(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

inline std::size_t threshold_error(const ThresholdErrorCase& c) {
  return absolute_difference(cut_above(c.scores(), c.threshold()), c.optimal_cut());
}

/// Per-row threshold errors eps_i = |#{j : f_ij > t_i} - |Y+_i||. Equals the
/// number of misclassified labels on row i when F is label-wise effective.
inline std::vector<std::size_t> row_threshold_errors(const ScoreMatrix& f, const LabelMatrix& y,
                                                     std::span<const double> thresholds) {
  require_same_shape(f, y);
  detail::require(thresholds.size() == y.rows(), "one threshold per row expected");
  std::vector<std::size_t> eps(y.rows());
  for (Index i = 0; i < y.rows(); ++i) eps[i] = absolute_difference(cut_above(f.row(i), thresholds[i]), y.positives(i).size());
  return eps;
}

/// Column analogue of row_threshold_errors.
inline std::vector<std::size_t> column_threshold_errors(const ScoreMatrix& f, const LabelMatrix& y,
                                                        std::span<const double> thresholds) {
  require_same_shape(f, y);
  detail::require(thresholds.size() == y.cols(), "one threshold per label expected");
  std::vector<std::size_t> eps(y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    std::size_t above = 0;
    for (Index i = 0; i < y.rows(); ++i) above += f(i, j) > thresholds[j];
    eps[j] = absolute_difference(above, y.column_positives(j).size());
  }
  return eps;
}

// ---------------------------------------------------------------------------
// F1 / Hamming bounds under threshold error

/// Worst F1 of a correctly ordered sequence with `positives` relevant and
/// `negatives` irrelevant items whose cut is off by `error`. The error is
/// either all false negatives, 2(p - e) / (2p - e), or all false positives,
/// 2p / (2p + e); only the cases that fit in the sequence are considered.
/// An empty (p = 0, e = 0) item scores 1, matching the F1 convention.
inline double f1_error_bound(std::size_t positives, std::size_t negatives, std::size_t error) {
  if (error == 0) return 1.0;
  const double p = static_cast<double>(positives), e = static_cast<double>(error);
  double bound = std::numeric_limits<double>::infinity();
  if (error <= positives) bound = std::min(bound, 2.0 * (p - e) / (2.0 * p - e));
  if (error <= negatives) bound = std::min(bound, 2.0 * p / (2.0 * p + e));
  detail::require(std::isfinite(bound), "threshold error exceeds the sequence length");
  return bound;
}

/// Lower bound on instance-F1 from per-row threshold errors.
inline double instance_f1_lower_bound(const LabelMatrix& y, std::span<const std::size_t> row_errors) {
  detail::require(row_errors.size() == y.rows(), "one error per row expected");
  double sum = 0.0;
  for (Index i = 0; i < y.rows(); ++i) sum += f1_error_bound(y.positives(i).size(), y.negatives(i).size(), row_errors[i]);
  return sum / static_cast<double>(y.rows());
}

/// Lower bound on macro-F1 from per-label threshold errors.
inline double macro_f1_lower_bound(const LabelMatrix& y, std::span<const std::size_t> column_errors) {
  detail::require(column_errors.size() == y.cols(), "one error per label expected");
  double sum = 0.0;
  for (Index j = 0; j < y.cols(); ++j)
    sum += f1_error_bound(y.column_positives(j).size(), y.column_negatives(j).size(), column_errors[j]);
  return sum / static_cast<double>(y.cols());
}

/// Upper bound on Hamming loss: total threshold error over m * l.
inline double hamming_upper_bound(const LabelMatrix& y, std::span<const std::size_t> errors) {
  const auto total = std::accumulate(errors.begin(), errors.end(), std::size_t{0});
  return static_cast<double>(total) / static_cast<double>(y.rows() * y.cols());
}

// ---------------------------------------------------------------------------
// Score constructors

enum class Effectiveness { label_wise, instance_wise, both };

/// Scores with a prescribed effectiveness on Y.
///
/// both:           F = Y + U(0, 0.49), so every margin exceeds 0.51.
/// label_wise:     rows of the `both` matrix scaled by powers of ten until some
///                 column loses its instance-wise order.
/// instance_wise:  the column analogue.
/// Throws SetupError when the "only" kind cannot be realised on Y.
inline ScoreMatrix make_effective_oracle(const LabelMatrix& y, Effectiveness kind, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, Stream::oracle, static_cast<std::uint64_t>(kind));
  const Index m = y.rows(), l = y.cols();
  Matrix f(m, l);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < l; ++j) f(i, j) = (y(i, j) ? 1.0 : 0.0) + 0.49 * rng.uniform_open01();
  if (kind == Effectiveness::both) return ScoreMatrix(std::move(f));

  // Scaling rows keeps label-wise order and may break instance-wise order
  // (scaling columns is the transpose case).
  const bool rows = kind == Effectiveness::label_wise;
  const Index groups = rows ? m : l;
  std::vector<Index> exponent(groups);
  std::iota(exponent.begin(), exponent.end(), Index{0});
  for (Index k = groups; k > 1; --k) std::swap(exponent[k - 1], exponent[rng.below(k)]);
  for (Index g = 0; g < groups; ++g) {
    const double scale = std::pow(10.0, static_cast<double>(exponent[g] % 16));
    if (rows)
      f.row(g) *= scale;
    else
      f.col(g) *= scale;
  }

  auto broken = [&](const Matrix& s) {
    ScoreMatrix sm(s);
    return rows ? !is_instance_wise_effective(sm, y) : !is_label_wise_effective(sm, y);
  };
  if (!broken(f)) {
    // Find one ordered pair to invert and lift the lower group's scale.
    bool fixed = false;
    for (Index c = 0; c < (rows ? l : m) && !fixed; ++c) {
      auto hi = rows ? y.column_positives(c) : y.positives(c);
      auto lo = rows ? y.column_negatives(c) : y.negatives(c);
      if (hi.empty() || lo.empty()) continue;
      const Index a = hi.front(), b = lo.front();
      const double high = rows ? f(a, c) : f(c, a);
      const double low = rows ? f(b, c) : f(c, b);
      const double factor = std::pow(10.0, std::ceil(std::log10(high / low)) + 1.0);
      if (rows)
        f.row(b) *= factor;
      else
        f.col(b) *= factor;
      fixed = true;
    }
    if (!fixed || !broken(f))
      throw SetupError(rows ? "no label has both positive and negative instances; cannot break instance-wise order"
                            : "no instance has both relevant and irrelevant labels; cannot break label-wise order");
  }
  ScoreMatrix out(std::move(f));
  const bool ok = rows ? is_label_wise_effective(out, y) : is_instance_wise_effective(out, y);
  if (!ok) throw SetupError("oracle construction lost the requested effectiveness");
  return out;
}

/// Double-effective scores built like the micro-AUC argument: positive cells
/// ~ U(0, 1); each negative cell ~ U(0, b) with b the smallest positive score
/// in its row and column (whichever sides have positives; U(0, 1) if neither).
inline ScoreMatrix make_generative_oracle(const LabelMatrix& y, std::uint64_t seed) {
  detail::require(y.count() > 0, "make_generative_oracle: label matrix has no positive cell");
  Rng rng = Rng::substream(seed, Stream::oracle, 100);
  const Index m = y.rows(), l = y.cols();
  Matrix f(m, l);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < l; ++j)
      if (y(i, j)) f(i, j) = rng.uniform_open01();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> row_min(m, inf), col_min(l, inf);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < l; ++j)
      if (y(i, j)) {
        row_min[i] = std::min(row_min[i], f(i, j));
        col_min[j] = std::min(col_min[j], f(i, j));
      }
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < l; ++j) {
      if (y(i, j)) continue;
      double b = std::min(row_min[i], col_min[j]);
      if (!std::isfinite(b)) b = 1.0;
      double v;
      do v = b * rng.uniform_open01();
      while (!(v < b) || v <= 0.0);
      f(i, j) = v;
    }
  return ScoreMatrix(std::move(f));
}

}  // namespace limo

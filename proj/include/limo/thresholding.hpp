#pragma once

// Turning score matrices into binary predictions.
//
// Two families of thresholds:
//   * per label: one cut t_j down each score column, h_ij = [f_ij > t_j];
//   * per instance: a cut across each score row, realised as "the top c
//     labels of row i" with the rank tie-break of the measures module.
//
// Per-instance cuts for unseen rows come from an InstanceThresholder fitted
// on training scores.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "limo/data.hpp"
#include "limo/measures.hpp"

namespace limo {

struct PerLabelThresholds {
  std::vector<double> values;

  PerLabelThresholds() = default;
  explicit PerLabelThresholds(std::vector<double> t) : values(std::move(t)) {
    for (double v : values) detail::require(std::isfinite(v), "per-label thresholds must be finite");
  }

  Index labels() const { return values.size(); }
  friend bool operator==(const PerLabelThresholds&, const PerLabelThresholds&) = default;
};

enum class CalibrationTarget { hamming_loss, macro_f1, micro_f1 };

inline CalibrationTarget parse_calibration_target(std::string_view name) {
  if (name == "hamming_loss" || name == "hamming") return CalibrationTarget::hamming_loss;
  if (name == "macro_f1") return CalibrationTarget::macro_f1;
  if (name == "micro_f1") return CalibrationTarget::micro_f1;
  throw ArgumentError("unknown calibration target '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Cut helpers

/// The labels of one row ordered by descending score, ties by ascending index.
inline std::vector<Index> descending_order(std::span<const double> row) {
  std::vector<Index> order(row.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return row[a] > row[b]; });
  return order;
}

/// H for explicit per-row cuts: the top cuts[i] labels of row i.
inline PredictionMatrix induce_classifier(const ScoreMatrix& f, std::span<const std::size_t> cuts) {
  detail::require(cuts.size() == f.rows(), "one cut per row required");
  std::vector<std::uint8_t> bits(f.rows() * f.cols(), 0);
  for (Index i = 0; i < f.rows(); ++i) {
    detail::require(cuts[i] <= f.cols(), "cut exceeds the label count");
    auto order = descending_order(f.row(i));
    for (std::size_t r = 0; r < cuts[i]; ++r) bits[i * f.cols() + order[r]] = 1;
  }
  return PredictionMatrix(f.rows(), f.cols(), std::move(bits));
}

inline PredictionMatrix induce_classifier(const ScoreMatrix& f, const PerLabelThresholds& t) {
  detail::require(t.labels() == f.cols(), "threshold count does not match the label count");
  std::vector<std::uint8_t> bits(f.rows() * f.cols(), 0);
  for (Index i = 0; i < f.rows(); ++i)
    for (Index j = 0; j < f.cols(); ++j) bits[i * f.cols() + j] = f(i, j) > t.values[j];
  return PredictionMatrix(f.rows(), f.cols(), std::move(bits));
}

/// Cut minimising row Hamming error on training labels; ties go to the smaller cut.
inline std::size_t optimal_row_cut(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  auto order = descending_order(scores);
  std::size_t errors = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  std::size_t best = 0, best_errors = errors;
  for (std::size_t c = 1; c <= order.size(); ++c) {
    if (labels[order[c - 1]]) --errors;
    else ++errors;
    if (errors < best_errors) best = c, best_errors = errors;
  }
  return best;
}

namespace threshold_detail {

/// A value t with lower < t < upper when one exists, otherwise `lower`
/// (so that "> t" still separates the two).
inline double separating_midpoint(double upper, double lower) {
  const double mid = std::midpoint(lower, upper);
  return (lower < mid && mid < upper) ? mid : lower;
}

inline double below(double v) {
  const double t = v - 1.0;
  return t < v ? t : std::nextafter(v, -std::numeric_limits<double>::infinity());
}

inline double above(double v) {
  const double t = v + 1.0;
  return t > v ? t : std::nextafter(v, std::numeric_limits<double>::infinity());
}

/// Candidate k predicts the k highest distinct score groups of a column.
/// thresholds[k] realises candidate k, with its true and predicted positive counts.
struct ColumnSweep {
  std::vector<double> thresholds;
  std::vector<std::size_t> true_positives;
  std::vector<std::size_t> predicted;
  std::size_t positives = 0;
};

inline ColumnSweep sweep_column(const ScoreMatrix& f, const LabelMatrix& y, Index j) {
  std::vector<std::pair<double, bool>> cells;
  cells.reserve(f.rows());
  for (Index i = 0; i < f.rows(); ++i) cells.emplace_back(f(i, j), y(i, j));
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  ColumnSweep s;
  for (const auto& c : cells) s.positives += c.second;
  s.thresholds.push_back(above(cells.front().first));
  s.true_positives.push_back(0);
  s.predicted.push_back(0);
  std::size_t tp = 0, n = 0;
  for (std::size_t k = 0; k < cells.size();) {
    const double v = cells[k].first;
    for (; k < cells.size() && cells[k].first == v; ++k) tp += cells[k].second, ++n;
    s.thresholds.push_back(k < cells.size() ? separating_midpoint(v, cells[k].first) : below(v));
    s.true_positives.push_back(tp);
    s.predicted.push_back(n);
  }
  return s;
}

inline double f1_ratio(std::size_t tp, std::size_t positives, std::size_t predicted) {
  const std::size_t denom = positives + predicted;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

/// Index of the best candidate; candidates are ordered from the largest
/// threshold down, so keeping the first optimum prefers larger thresholds.
template <class Score>
std::size_t best_candidate(const ColumnSweep& s, Score score) {
  std::size_t best = 0;
  double best_value = score(0);
  for (std::size_t k = 1; k < s.thresholds.size(); ++k) {
    const double v = score(k);
    if (v > best_value) best = k, best_value = v;
  }
  return best;
}

}  // namespace threshold_detail

/// Chooses one threshold per label on training scores.
///
/// Candidates are midpoints between consecutive distinct sorted scores plus
/// a sentinel below the minimum and one above the maximum. Hamming loss and
/// macro-F1 are optimised label by label (ties prefer the larger threshold).
/// Micro-F1 starts from the macro-F1 solution and runs one greedy coordinate
/// pass in label order.
inline PerLabelThresholds calibrate_per_label(const ScoreMatrix& f, const LabelMatrix& y, CalibrationTarget target) {
  require_same_shape(f, y);
  using namespace threshold_detail;
  std::vector<ColumnSweep> sweeps;
  sweeps.reserve(y.cols());
  for (Index j = 0; j < y.cols(); ++j) sweeps.push_back(sweep_column(f, y, j));

  std::vector<std::size_t> choice(y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    const auto& s = sweeps[j];
    if (target == CalibrationTarget::hamming_loss) {
      // errors = fp + fn = predicted - 2 tp + positives; maximise the negation.
      choice[j] = best_candidate(s, [&](std::size_t k) {
        return -static_cast<double>(s.predicted[k] + s.positives - 2 * s.true_positives[k]);
      });
    } else {
      choice[j] = best_candidate(s, [&](std::size_t k) { return f1_ratio(s.true_positives[k], s.positives, s.predicted[k]); });
    }
  }

  if (target == CalibrationTarget::micro_f1) {
    std::size_t tp = 0, positives = 0, predicted = 0;
    for (Index j = 0; j < y.cols(); ++j) {
      tp += sweeps[j].true_positives[choice[j]];
      positives += sweeps[j].positives;
      predicted += sweeps[j].predicted[choice[j]];
    }
    for (Index j = 0; j < y.cols(); ++j) {
      const auto& s = sweeps[j];
      const std::size_t tp_rest = tp - s.true_positives[choice[j]];
      const std::size_t pred_rest = predicted - s.predicted[choice[j]];
      const double current = f1_ratio(tp, positives, predicted);
      const std::size_t k = best_candidate(s, [&](std::size_t c) {
        return f1_ratio(tp_rest + s.true_positives[c], positives, pred_rest + s.predicted[c]);
      });
      if (f1_ratio(tp_rest + s.true_positives[k], positives, pred_rest + s.predicted[k]) > current) {
        choice[j] = k;
        tp = tp_rest + s.true_positives[k];
        predicted = pred_rest + s.predicted[k];
      }
    }
  }

  std::vector<double> t(y.cols());
  for (Index j = 0; j < y.cols(); ++j) t[j] = sweeps[j].thresholds[choice[j]];
  return PerLabelThresholds(std::move(t));
}

// ---------------------------------------------------------------------------
// Per-instance thresholds

/// Maps a score row to a cut in [0, l].
///
/// constant_cut: the same cut for every row.
/// regression: t(x) = coef . [sorted row descending, 1]; cut = #{scores > t}.
/// global_threshold: cut = #{scores > t} for one fitted t.
class InstanceThresholder {
 public:
  enum class Mode { constant_cut, regression, global_threshold };

  static InstanceThresholder constant(Index labels, std::size_t cut) {
    detail::require(cut <= labels, "constant cut exceeds the label count");
    InstanceThresholder t(Mode::constant_cut, labels);
    t.cut_ = cut;
    return t;
  }

  static InstanceThresholder regression(Index labels, std::vector<double> coefficients) {
    detail::require(coefficients.size() == labels + 1, "regression needs l + 1 coefficients");
    for (double c : coefficients) detail::require(std::isfinite(c), "regression coefficients must be finite");
    InstanceThresholder t(Mode::regression, labels);
    t.coefficients_ = std::move(coefficients);
    return t;
  }

  static InstanceThresholder global(Index labels, double threshold) {
    detail::require(std::isfinite(threshold), "threshold must be finite");
    InstanceThresholder t(Mode::global_threshold, labels);
    t.threshold_ = threshold;
    return t;
  }

  Mode mode() const { return mode_; }
  Index labels() const { return labels_; }
  std::size_t constant_cut() const { return cut_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double global_threshold() const { return threshold_; }

  /// The row's threshold value; undefined for constant_cut. The regression
  /// acts on the sorted row divided by its largest magnitude, so rescaling a
  /// row rescales its threshold.
  double threshold_for(std::span<const double> row) const {
    if (mode_ == Mode::global_threshold) return threshold_;
    const auto [sorted, scale] = normalized_sorted(row);
    double t = coefficients_.back();
    for (Index k = 0; k < labels_; ++k) t += coefficients_[k] * sorted[k];
    return t * scale;
  }

  struct NormalizedRow {
    std::vector<double> sorted;
    double scale;
  };

  static NormalizedRow normalized_sorted(std::span<const double> row) {
    NormalizedRow r{{row.begin(), row.end()}, 0.0};
    std::sort(r.sorted.begin(), r.sorted.end(), std::greater<>());
    for (double v : r.sorted) r.scale = std::max(r.scale, std::abs(v));
    if (r.scale == 0.0) r.scale = 1.0;
    for (double& v : r.sorted) v /= r.scale;
    return r;
  }

  std::size_t predict_cut(std::span<const double> row) const {
    detail::require(row.size() == labels_, "score row length does not match the thresholder");
    if (mode_ == Mode::constant_cut) return cut_;
    const double t = threshold_for(row);
    return static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [&](double v) { return v > t; }));
  }

  std::vector<std::size_t> predict_cuts(const ScoreMatrix& f) const {
    std::vector<std::size_t> cuts(f.rows());
    for (Index i = 0; i < f.rows(); ++i) cuts[i] = predict_cut(f.row(i));
    return cuts;
  }

  friend bool operator==(const InstanceThresholder&, const InstanceThresholder&) = default;

 private:
  InstanceThresholder(Mode m, Index labels) : mode_(m), labels_(labels) {}

  Mode mode_ = Mode::constant_cut;
  Index labels_ = 0;
  std::size_t cut_ = 0;
  std::vector<double> coefficients_;
  double threshold_ = 0.0;
};

inline PredictionMatrix induce_classifier(const ScoreMatrix& f, const InstanceThresholder& t) {
  detail::require(t.labels() == f.cols(), "thresholder label count does not match the score matrix");
  const auto cuts = t.predict_cuts(f);
  return induce_classifier(f, cuts);
}

namespace threshold_detail {

inline std::size_t training_errors(const ScoreMatrix& f, const LabelMatrix& y, const InstanceThresholder& t) {
  const auto h = induce_classifier(f, t);
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < y.bits().size(); ++k) wrong += h.bits()[k] != y.bits()[k];
  return wrong;
}

/// Single threshold minimising Hamming error over all cells (ties → larger).
inline double global_hamming_threshold(const ScoreMatrix& f, const LabelMatrix& y) {
  std::vector<std::pair<double, bool>> cells;
  for (Index i = 0; i < y.rows(); ++i)
    for (Index j = 0; j < y.cols(); ++j) cells.emplace_back(f(i, j), y(i, j));
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t positives = 0;
  for (const auto& c : cells) positives += c.second;
  long long errors = static_cast<long long>(positives), best_errors = errors;
  double best = above(cells.front().first);
  for (std::size_t k = 0; k < cells.size();) {
    const double v = cells[k].first;
    for (; k < cells.size() && cells[k].first == v; ++k) errors += cells[k].second ? -1 : 1;
    if (errors < best_errors) {
      best_errors = errors;
      best = k < cells.size() ? separating_midpoint(v, cells[k].first) : below(v);
    }
  }
  return best;
}

}  // namespace threshold_detail

/// Fits a per-instance thresholder on training scores.
///
/// Each training row gets its optimal cut c* (see optimal_row_cut). Rows with
/// 0 < c* < l give a regression target: the midpoint between their c*-th and
/// (c*+1)-th largest score. Candidates are a constant cut (rounded mean c*),
/// the least-squares regression when at least l + 2 rows are usable, and a
/// single global threshold; the one with the fewest training errors wins,
/// ties in that order.
inline InstanceThresholder fit_instance_thresholder(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  using namespace threshold_detail;
  const Index m = y.rows(), l = y.cols();

  std::vector<std::size_t> cuts(m);
  double cut_sum = 0.0;
  for (Index i = 0; i < m; ++i) {
    cuts[i] = optimal_row_cut(f.row(i), y.row(i));
    cut_sum += static_cast<double>(cuts[i]);
  }
  const auto mean_cut = static_cast<std::size_t>(std::llround(cut_sum / static_cast<double>(m)));
  std::vector<InstanceThresholder> candidates{InstanceThresholder::constant(l, std::min<std::size_t>(mean_cut, l))};

  std::vector<Index> usable;
  for (Index i = 0; i < m; ++i)
    if (cuts[i] > 0 && cuts[i] < l) usable.push_back(i);
  if (usable.size() >= l + 2) {
    Eigen::MatrixXd design(usable.size(), l + 1);
    Eigen::VectorXd target(usable.size());
    for (std::size_t r = 0; r < usable.size(); ++r) {
      const Index i = usable[r];
      const auto sorted = InstanceThresholder::normalized_sorted(f.row(i)).sorted;
      for (Index k = 0; k < l; ++k) design(r, k) = sorted[k];
      design(r, l) = 1.0;
      target(r) = std::midpoint(sorted[cuts[i] - 1], sorted[cuts[i]]);
    }
    const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);
    if (coef.allFinite()) candidates.push_back(InstanceThresholder::regression(l, {coef.data(), coef.data() + coef.size()}));
  }
  candidates.push_back(InstanceThresholder::global(l, global_hamming_threshold(f, y)));

  std::size_t best = 0, best_errors = training_errors(f, y, candidates[0]);
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const std::size_t e = training_errors(f, y, candidates[c]);
    if (e < best_errors) best = c, best_errors = e;
  }
  return candidates[best];
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json to_json(const PerLabelThresholds& t) {
  nlohmann::ordered_json j;
  j["mode"] = "per_label";
  j["thresholds"] = t.values;
  return j;
}

inline PerLabelThresholds per_label_thresholds_from_json(const nlohmann::ordered_json& j) {
  if (j.value("mode", "") != "per_label") throw DataError("expected per-label thresholds");
  return PerLabelThresholds(j.at("thresholds").get<std::vector<double>>());
}

inline nlohmann::ordered_json to_json(const InstanceThresholder& t) {
  nlohmann::ordered_json j;
  j["mode"] = "per_instance";
  j["labels"] = t.labels();
  switch (t.mode()) {
    case InstanceThresholder::Mode::constant_cut:
      j["kind"] = "constant_cut";
      j["cut"] = t.constant_cut();
      break;
    case InstanceThresholder::Mode::regression:
      j["kind"] = "regression";
      j["coefficients"] = t.coefficients();
      break;
    case InstanceThresholder::Mode::global_threshold:
      j["kind"] = "global_threshold";
      j["threshold"] = t.global_threshold();
      break;
  }
  return j;
}

inline InstanceThresholder instance_thresholder_from_json(const nlohmann::ordered_json& j) {
  if (j.value("mode", "") != "per_instance") throw DataError("expected a per-instance thresholder");
  const auto labels = j.at("labels").get<Index>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant_cut") return InstanceThresholder::constant(labels, j.at("cut").get<std::size_t>());
  if (kind == "regression") return InstanceThresholder::regression(labels, j.at("coefficients").get<std::vector<double>>());
  if (kind == "global_threshold") return InstanceThresholder::global(labels, j.at("threshold").get<double>());
  throw DataError("unknown thresholder kind '" + kind + "'");
}

}  // namespace limo

#pragma once

// The eleven multi-label performance measures.
//
// Ranking measures take a score matrix F, classification measures a
// prediction matrix H. Ties follow the literal set definitions: a tied
// (relevant, irrelevant) pair is reversed for ranking loss and correct for
// every AUC. Rank and argmax ties are broken by ascending label index.
//
// Rows (or columns) on which a measure is undefined, e.g. an instance with no
// irrelevant label for ranking loss, are left out of the average and counted.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "limo/data.hpp"

namespace limo {

enum class Measure {
  hamming_loss,
  ranking_loss,
  one_error,
  coverage,
  average_precision,
  macro_f1,
  instance_f1,
  micro_f1,
  macro_auc,
  instance_auc,
  micro_auc,
};

inline constexpr std::array<Measure, 11> all_measures{
    Measure::hamming_loss, Measure::ranking_loss, Measure::one_error,   Measure::coverage,
    Measure::average_precision, Measure::macro_f1, Measure::instance_f1, Measure::micro_f1,
    Measure::macro_auc,    Measure::instance_auc, Measure::micro_auc};

inline constexpr std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::hamming_loss: return "hamming_loss";
    case Measure::ranking_loss: return "ranking_loss";
    case Measure::one_error: return "one_error";
    case Measure::coverage: return "coverage";
    case Measure::average_precision: return "average_precision";
    case Measure::macro_f1: return "macro_f1";
    case Measure::instance_f1: return "instance_f1";
    case Measure::micro_f1: return "micro_f1";
    case Measure::macro_auc: return "macro_auc";
    case Measure::instance_auc: return "instance_auc";
    case Measure::micro_auc: return "micro_auc";
  }
  return "";
}

inline std::optional<Measure> parse_measure(std::string_view name) {
  for (auto m : all_measures)
    if (measure_name(m) == name) return m;
  return std::nullopt;
}

/// True for measures defined on H (thresholded output).
inline constexpr bool needs_classifier(Measure m) {
  return m == Measure::hamming_loss || m == Measure::macro_f1 || m == Measure::instance_f1 ||
         m == Measure::micro_f1;
}

inline constexpr bool lower_is_better(Measure m) {
  return m == Measure::hamming_loss || m == Measure::ranking_loss || m == Measure::one_error ||
         m == Measure::coverage;
}

/// A measure value together with the number of rows/columns it skipped.
struct MeasureValue {
  double value = 0.0;
  std::size_t skipped = 0;
};

namespace measures_detail {

/// Number of (p, n) pairs with p >= n (or p > n when strict).
inline std::size_t count_ordered_pairs(std::vector<double> positives, std::vector<double> negatives,
                                       bool strict) {
  std::sort(negatives.begin(), negatives.end());
  std::size_t count = 0;
  for (double p : positives) {
    auto it = strict ? std::lower_bound(negatives.begin(), negatives.end(), p)
                     : std::upper_bound(negatives.begin(), negatives.end(), p);
    count += static_cast<std::size_t>(it - negatives.begin());
  }
  return count;
}

inline std::vector<double> gather(std::span<const double> values, std::span<const Index> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto k : idx) out.push_back(values[k]);
  return out;
}

inline std::vector<double> column(const ScoreMatrix& f, Index j, std::span<const Index> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto i : rows) out.push_back(f(i, j));
  return out;
}

inline EvaluationError no_eligible(std::string_view measure, std::string_view what) {
  return EvaluationError(std::string(measure) + ": no eligible " + std::string(what));
}

/// 1-based descending ranks of one row, ties broken by ascending index.
inline std::vector<std::size_t> row_ranks(std::span<const double> row) {
  std::vector<Index> order(row.size());
  for (Index k = 0; k < row.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return row[a] > row[b]; });
  std::vector<std::size_t> rank(row.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  return rank;
}

}  // namespace measures_detail

/// 1-based rank of label j in row i of F, sorted descending.
inline std::size_t rank_of(const ScoreMatrix& f, Index i, Index j) {
  detail::require(i < f.rows() && j < f.cols(), "rank_of: index out of range");
  auto row = f.row(i);
  std::size_t rank = 1;
  for (Index k = 0; k < row.size(); ++k)
    if (row[k] > row[j] || (row[k] == row[j] && k < j)) ++rank;
  return rank;
}

// ---------------------------------------------------------------------------
// Classification measures

inline double hamming_loss(const PredictionMatrix& h, const LabelMatrix& y) {
  require_same_shape(h, y);
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < y.bits().size(); ++k) wrong += h.bits()[k] != y.bits()[k];
  return static_cast<double>(wrong) / static_cast<double>(y.rows() * y.cols());
}

/// F1 of one label; a zero denominator (no positives, none predicted) counts as 1.
inline MeasureValue macro_f1_detail(const PredictionMatrix& h, const LabelMatrix& y) {
  require_same_shape(h, y);
  MeasureValue out;
  double sum = 0.0;
  for (Index j = 0; j < y.cols(); ++j) {
    std::size_t tp = 0, ys = 0, hs = 0;
    for (Index i = 0; i < y.rows(); ++i) {
      tp += y(i, j) && h(i, j);
      ys += y(i, j);
      hs += h(i, j);
    }
    if (ys + hs == 0) {
      sum += 1.0;
      ++out.skipped;
    } else {
      sum += 2.0 * static_cast<double>(tp) / static_cast<double>(ys + hs);
    }
  }
  out.value = sum / static_cast<double>(y.cols());
  return out;
}

inline double macro_f1(const PredictionMatrix& h, const LabelMatrix& y) { return macro_f1_detail(h, y).value; }

inline MeasureValue instance_f1_detail(const PredictionMatrix& h, const LabelMatrix& y) {
  require_same_shape(h, y);
  MeasureValue out;
  double sum = 0.0;
  for (Index i = 0; i < y.rows(); ++i) {
    std::size_t tp = 0, ys = 0, hs = 0;
    for (Index j = 0; j < y.cols(); ++j) {
      tp += y(i, j) && h(i, j);
      ys += y(i, j);
      hs += h(i, j);
    }
    if (ys + hs == 0) {
      sum += 1.0;
      ++out.skipped;
    } else {
      sum += 2.0 * static_cast<double>(tp) / static_cast<double>(ys + hs);
    }
  }
  out.value = sum / static_cast<double>(y.rows());
  return out;
}

inline double instance_f1(const PredictionMatrix& h, const LabelMatrix& y) {
  return instance_f1_detail(h, y).value;
}

inline double micro_f1(const PredictionMatrix& h, const LabelMatrix& y) {
  require_same_shape(h, y);
  std::size_t tp = 0, ys = 0, hs = 0;
  for (std::size_t k = 0; k < y.bits().size(); ++k) {
    tp += y.bits()[k] && h.bits()[k];
    ys += y.bits()[k];
    hs += h.bits()[k];
  }
  if (ys + hs == 0) throw EvaluationError("micro_f1: label and prediction matrices are both empty");
  return 2.0 * static_cast<double>(tp) / static_cast<double>(ys + hs);
}

// ---------------------------------------------------------------------------
// Ranking measures

inline MeasureValue ranking_loss_detail(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  using namespace measures_detail;
  MeasureValue out;
  double sum = 0.0;
  std::size_t eligible = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    const std::size_t pairs = y.row_pairs(i);
    if (pairs == 0) {
      ++out.skipped;
      continue;
    }
    auto row = f.row(i);
    const std::size_t correct = count_ordered_pairs(gather(row, y.positives(i)), gather(row, y.negatives(i)), true);
    sum += static_cast<double>(pairs - correct) / static_cast<double>(pairs);
    ++eligible;
  }
  if (eligible == 0) throw no_eligible("ranking_loss", "row");
  out.value = sum / static_cast<double>(eligible);
  return out;
}

inline double ranking_loss(const ScoreMatrix& f, const LabelMatrix& y) { return ranking_loss_detail(f, y).value; }

inline MeasureValue one_error_detail(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  MeasureValue out;
  std::size_t errors = 0, eligible = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    if (y.positives(i).empty()) {
      ++out.skipped;
      continue;
    }
    auto row = f.row(i);
    const auto top = static_cast<Index>(std::max_element(row.begin(), row.end()) - row.begin());
    errors += !y(i, top);
    ++eligible;
  }
  if (eligible == 0) throw measures_detail::no_eligible("one_error", "row");
  out.value = static_cast<double>(errors) / static_cast<double>(eligible);
  return out;
}

inline double one_error(const ScoreMatrix& f, const LabelMatrix& y) { return one_error_detail(f, y).value; }

inline MeasureValue coverage_detail(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  MeasureValue out;
  double sum = 0.0;
  std::size_t eligible = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    if (y.positives(i).empty()) {
      ++out.skipped;
      continue;
    }
    auto ranks = measures_detail::row_ranks(f.row(i));
    std::size_t worst = 0;
    for (auto j : y.positives(i)) worst = std::max(worst, ranks[j]);
    sum += static_cast<double>(worst - 1);
    ++eligible;
  }
  if (eligible == 0) throw measures_detail::no_eligible("coverage", "row");
  out.value = sum / static_cast<double>(eligible);
  return out;
}

inline double coverage(const ScoreMatrix& f, const LabelMatrix& y) { return coverage_detail(f, y).value; }

inline MeasureValue average_precision_detail(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  MeasureValue out;
  double sum = 0.0;
  std::size_t eligible = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    auto pos = y.positives(i);
    if (pos.empty()) {
      ++out.skipped;
      continue;
    }
    auto ranks = measures_detail::row_ranks(f.row(i));
    std::vector<std::size_t> relevant_ranks;
    for (auto j : pos) relevant_ranks.push_back(ranks[j]);
    std::sort(relevant_ranks.begin(), relevant_ranks.end());
    double row_sum = 0.0;
    for (auto j : pos) {
      const auto above = static_cast<std::size_t>(
          std::upper_bound(relevant_ranks.begin(), relevant_ranks.end(), ranks[j]) - relevant_ranks.begin());
      row_sum += static_cast<double>(above) / static_cast<double>(ranks[j]);
    }
    sum += row_sum / static_cast<double>(pos.size());
    ++eligible;
  }
  if (eligible == 0) throw measures_detail::no_eligible("average_precision", "row");
  out.value = sum / static_cast<double>(eligible);
  return out;
}

inline double average_precision(const ScoreMatrix& f, const LabelMatrix& y) {
  return average_precision_detail(f, y).value;
}

inline MeasureValue macro_auc_detail(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  using namespace measures_detail;
  MeasureValue out;
  double sum = 0.0;
  std::size_t eligible = 0;
  for (Index j = 0; j < y.cols(); ++j) {
    const std::size_t pairs = y.column_pairs(j);
    if (pairs == 0) {
      ++out.skipped;
      continue;
    }
    const std::size_t correct =
        count_ordered_pairs(column(f, j, y.column_positives(j)), column(f, j, y.column_negatives(j)), false);
    sum += static_cast<double>(correct) / static_cast<double>(pairs);
    ++eligible;
  }
  if (eligible == 0) throw no_eligible("macro_auc", "column");
  out.value = sum / static_cast<double>(eligible);
  return out;
}

inline double macro_auc(const ScoreMatrix& f, const LabelMatrix& y) { return macro_auc_detail(f, y).value; }

inline MeasureValue instance_auc_detail(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  using namespace measures_detail;
  MeasureValue out;
  double sum = 0.0;
  std::size_t eligible = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    const std::size_t pairs = y.row_pairs(i);
    if (pairs == 0) {
      ++out.skipped;
      continue;
    }
    auto row = f.row(i);
    const std::size_t correct = count_ordered_pairs(gather(row, y.positives(i)), gather(row, y.negatives(i)), false);
    sum += static_cast<double>(correct) / static_cast<double>(pairs);
    ++eligible;
  }
  if (eligible == 0) throw no_eligible("instance_auc", "row");
  out.value = sum / static_cast<double>(eligible);
  return out;
}

inline double instance_auc(const ScoreMatrix& f, const LabelMatrix& y) { return instance_auc_detail(f, y).value; }

/// AUC over every (positive cell, negative cell) pair of the whole matrix.
inline double micro_auc(const ScoreMatrix& f, const LabelMatrix& y) {
  require_same_shape(f, y);
  std::vector<double> pos, neg;
  const auto& bits = y.bits();
  const double* scores = f.values().data();
  for (std::size_t k = 0; k < bits.size(); ++k) (bits[k] ? pos : neg).push_back(scores[k]);
  if (pos.empty() || neg.empty())
    throw EvaluationError("micro_auc: label matrix needs both a positive and a negative cell");
  const double pairs = static_cast<double>(pos.size()) * static_cast<double>(neg.size());
  const std::size_t correct = measures_detail::count_ordered_pairs(std::move(pos), std::move(neg), false);
  return static_cast<double>(correct) / pairs;
}

// ---------------------------------------------------------------------------
// Batch evaluation

struct MeasureReport {
  double hamming_loss = 0, ranking_loss = 0, one_error = 0, coverage = 0, average_precision = 0;
  double macro_f1 = 0, instance_f1 = 0, micro_f1 = 0, macro_auc = 0, instance_auc = 0, micro_auc = 0;

  struct Skips {
    std::size_t ranking_loss_rows = 0;
    std::size_t one_error_rows = 0;
    std::size_t coverage_rows = 0;
    std::size_t average_precision_rows = 0;
    std::size_t instance_auc_rows = 0;
    std::size_t macro_auc_columns = 0;
    std::size_t macro_f1_empty_labels = 0;
    std::size_t instance_f1_empty_rows = 0;
    friend bool operator==(const Skips&, const Skips&) = default;
  } skipped;

  double get(Measure m) const {
    switch (m) {
      case Measure::hamming_loss: return hamming_loss;
      case Measure::ranking_loss: return ranking_loss;
      case Measure::one_error: return one_error;
      case Measure::coverage: return coverage;
      case Measure::average_precision: return average_precision;
      case Measure::macro_f1: return macro_f1;
      case Measure::instance_f1: return instance_f1;
      case Measure::micro_f1: return micro_f1;
      case Measure::macro_auc: return macro_auc;
      case Measure::instance_auc: return instance_auc;
      case Measure::micro_auc: return micro_auc;
    }
    return 0.0;
  }

  friend bool operator==(const MeasureReport&, const MeasureReport&) = default;
};

/// Evaluates one measure. Classification measures need `h`.
inline MeasureValue evaluate(Measure m, const ScoreMatrix& f, const LabelMatrix& y,
                             const PredictionMatrix* h = nullptr) {
  if (needs_classifier(m))
    detail::require(h != nullptr, std::string(measure_name(m)) + " needs a prediction matrix");
  switch (m) {
    case Measure::hamming_loss: return {hamming_loss(*h, y), 0};
    case Measure::ranking_loss: return ranking_loss_detail(f, y);
    case Measure::one_error: return one_error_detail(f, y);
    case Measure::coverage: return coverage_detail(f, y);
    case Measure::average_precision: return average_precision_detail(f, y);
    case Measure::macro_f1: return macro_f1_detail(*h, y);
    case Measure::instance_f1: return instance_f1_detail(*h, y);
    case Measure::micro_f1: return {micro_f1(*h, y), 0};
    case Measure::macro_auc: return macro_auc_detail(f, y);
    case Measure::instance_auc: return instance_auc_detail(f, y);
    case Measure::micro_auc: return {micro_auc(f, y), 0};
  }
  return {};
}

/// All eleven measures. Instance-F1, micro-F1 and Hamming loss read the
/// per-instance thresholded H; macro-F1 reads the per-label thresholded H.
inline MeasureReport evaluate_all(const ScoreMatrix& f, const LabelMatrix& y, const PredictionMatrix& h_per_instance,
                                  const PredictionMatrix& h_per_label) {
  require_same_shape(f, y);
  require_same_shape(h_per_instance, y);
  require_same_shape(h_per_label, y);
  MeasureReport r;
  r.hamming_loss = hamming_loss(h_per_instance, y);
  auto rl = ranking_loss_detail(f, y);
  r.ranking_loss = rl.value;
  r.skipped.ranking_loss_rows = rl.skipped;
  auto oe = one_error_detail(f, y);
  r.one_error = oe.value;
  r.skipped.one_error_rows = oe.skipped;
  auto cv = coverage_detail(f, y);
  r.coverage = cv.value;
  r.skipped.coverage_rows = cv.skipped;
  auto ap = average_precision_detail(f, y);
  r.average_precision = ap.value;
  r.skipped.average_precision_rows = ap.skipped;
  auto maf = macro_f1_detail(h_per_label, y);
  r.macro_f1 = maf.value;
  r.skipped.macro_f1_empty_labels = maf.skipped;
  auto inf = instance_f1_detail(h_per_instance, y);
  r.instance_f1 = inf.value;
  r.skipped.instance_f1_empty_rows = inf.skipped;
  r.micro_f1 = micro_f1(h_per_instance, y);
  auto mauc = macro_auc_detail(f, y);
  r.macro_auc = mauc.value;
  r.skipped.macro_auc_columns = mauc.skipped;
  auto iauc = instance_auc_detail(f, y);
  r.instance_auc = iauc.value;
  r.skipped.instance_auc_rows = iauc.skipped;
  r.micro_auc = micro_auc(f, y);
  return r;
}

/// Flat object keyed by measure name, followed by the skip counters.
inline nlohmann::ordered_json to_json(const MeasureReport& r) {
  nlohmann::ordered_json j;
  for (auto m : all_measures) j[std::string(measure_name(m))] = r.get(m);
  auto& s = j["skipped"];
  s["ranking_loss_rows"] = r.skipped.ranking_loss_rows;
  s["one_error_rows"] = r.skipped.one_error_rows;
  s["coverage_rows"] = r.skipped.coverage_rows;
  s["average_precision_rows"] = r.skipped.average_precision_rows;
  s["instance_auc_rows"] = r.skipped.instance_auc_rows;
  s["macro_auc_columns"] = r.skipped.macro_auc_columns;
  s["macro_f1_empty_labels"] = r.skipped.macro_f1_empty_labels;
  s["instance_f1_empty_rows"] = r.skipped.instance_f1_empty_rows;
  return j;
}

}  // namespace limo

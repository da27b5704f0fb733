#pragma once

// Brute-force reference implementations and fuzz generators for the tests.
// Every oracle enumerates the defining sets directly (quadratic or worse).

#include <cstdint>
#include <optional>
#include <vector>

#include "limo/limo.hpp"

namespace oracle {

using limo::Index;
using limo::LabelMatrix;
using limo::PredictionMatrix;
using limo::ScoreMatrix;

/// Rank by counting the labels that precede j in the tie-broken order.
inline std::size_t rank(const ScoreMatrix& f, Index i, Index j) {
  std::size_t r = 1;
  for (Index k = 0; k < f.cols(); ++k)
    if (f(i, k) > f(i, j) || (f(i, k) == f(i, j) && k < j)) ++r;
  return r;
}

inline std::vector<Index> relevant(const LabelMatrix& y, Index i) {
  std::vector<Index> out;
  for (Index j = 0; j < y.cols(); ++j)
    if (y(i, j)) out.push_back(j);
  return out;
}

inline std::vector<Index> irrelevant(const LabelMatrix& y, Index i) {
  std::vector<Index> out;
  for (Index j = 0; j < y.cols(); ++j)
    if (!y(i, j)) out.push_back(j);
  return out;
}

inline double hamming(const PredictionMatrix& h, const LabelMatrix& y) {
  std::size_t diff = 0;
  for (Index i = 0; i < y.rows(); ++i)
    for (Index j = 0; j < y.cols(); ++j) diff += h(i, j) != y(i, j);
  return static_cast<double>(diff) / static_cast<double>(y.rows() * y.cols());
}

/// Row-averaged pair statistic: for each row with both sides non-empty,
/// |{(u, v) : keep(f_u, f_v)}| / (|Y+||Y-|).
template <class Keep>
std::optional<double> row_pair_average(const ScoreMatrix& f, const LabelMatrix& y, Keep keep) {
  double sum = 0.0;
  std::size_t rows = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    auto pos = relevant(y, i), neg = irrelevant(y, i);
    if (pos.empty() || neg.empty()) continue;
    std::size_t hits = 0;
    for (auto u : pos)
      for (auto v : neg) hits += keep(f(i, u), f(i, v));
    sum += static_cast<double>(hits) / static_cast<double>(pos.size() * neg.size());
    ++rows;
  }
  if (!rows) return std::nullopt;
  return sum / static_cast<double>(rows);
}

inline std::optional<double> ranking_loss(const ScoreMatrix& f, const LabelMatrix& y) {
  return row_pair_average(f, y, [](double a, double b) { return a <= b; });
}

inline std::optional<double> instance_auc(const ScoreMatrix& f, const LabelMatrix& y) {
  return row_pair_average(f, y, [](double a, double b) { return a >= b; });
}

inline std::optional<double> one_error(const ScoreMatrix& f, const LabelMatrix& y) {
  std::size_t errors = 0, rows = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    if (relevant(y, i).empty()) continue;
    Index top = 0;
    for (Index j = 0; j < y.cols(); ++j)
      if (rank(f, i, j) == 1) top = j;
    errors += !y(i, top);
    ++rows;
  }
  if (!rows) return std::nullopt;
  return static_cast<double>(errors) / static_cast<double>(rows);
}

inline std::optional<double> coverage(const ScoreMatrix& f, const LabelMatrix& y) {
  double sum = 0.0;
  std::size_t rows = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    auto pos = relevant(y, i);
    if (pos.empty()) continue;
    std::size_t worst = 0;
    for (auto j : pos) worst = std::max(worst, rank(f, i, j));
    sum += static_cast<double>(worst - 1);
    ++rows;
  }
  if (!rows) return std::nullopt;
  return sum / static_cast<double>(rows);
}

inline std::optional<double> average_precision(const ScoreMatrix& f, const LabelMatrix& y) {
  double sum = 0.0;
  std::size_t rows = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    auto pos = relevant(y, i);
    if (pos.empty()) continue;
    double row_sum = 0.0;
    for (auto j : pos) {
      std::size_t above = 0;
      for (auto k : pos) above += rank(f, i, k) <= rank(f, i, j);
      row_sum += static_cast<double>(above) / static_cast<double>(rank(f, i, j));
    }
    sum += row_sum / static_cast<double>(pos.size());
    ++rows;
  }
  if (!rows) return std::nullopt;
  return sum / static_cast<double>(rows);
}

inline std::optional<double> macro_auc(const ScoreMatrix& f, const LabelMatrix& y) {
  double sum = 0.0;
  std::size_t cols = 0;
  for (Index j = 0; j < y.cols(); ++j) {
    std::size_t hits = 0, pairs = 0;
    for (Index a = 0; a < y.rows(); ++a)
      for (Index b = 0; b < y.rows(); ++b)
        if (y(a, j) && !y(b, j)) {
          ++pairs;
          hits += f(a, j) >= f(b, j);
        }
    if (!pairs) continue;
    sum += static_cast<double>(hits) / static_cast<double>(pairs);
    ++cols;
  }
  if (!cols) return std::nullopt;
  return sum / static_cast<double>(cols);
}

inline std::optional<double> micro_auc(const ScoreMatrix& f, const LabelMatrix& y) {
  std::size_t hits = 0, pairs = 0;
  for (Index a = 0; a < y.rows(); ++a)
    for (Index u = 0; u < y.cols(); ++u)
      for (Index b = 0; b < y.rows(); ++b)
        for (Index v = 0; v < y.cols(); ++v)
          if (y(a, u) && !y(b, v)) {
            ++pairs;
            hits += f(a, u) >= f(b, v);
          }
  if (!pairs) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(pairs);
}

inline double f1_term(std::size_t tp, std::size_t ys, std::size_t hs) {
  return ys + hs == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(ys + hs);
}

inline double macro_f1(const PredictionMatrix& h, const LabelMatrix& y) {
  double sum = 0.0;
  for (Index j = 0; j < y.cols(); ++j) {
    std::size_t tp = 0, ys = 0, hs = 0;
    for (Index i = 0; i < y.rows(); ++i) tp += y(i, j) && h(i, j), ys += y(i, j), hs += h(i, j);
    sum += f1_term(tp, ys, hs);
  }
  return sum / static_cast<double>(y.cols());
}

inline double instance_f1(const PredictionMatrix& h, const LabelMatrix& y) {
  double sum = 0.0;
  for (Index i = 0; i < y.rows(); ++i) {
    std::size_t tp = 0, ys = 0, hs = 0;
    for (Index j = 0; j < y.cols(); ++j) tp += y(i, j) && h(i, j), ys += y(i, j), hs += h(i, j);
    sum += f1_term(tp, ys, hs);
  }
  return sum / static_cast<double>(y.rows());
}

inline std::optional<double> micro_f1(const PredictionMatrix& h, const LabelMatrix& y) {
  std::size_t tp = 0, ys = 0, hs = 0;
  for (Index i = 0; i < y.rows(); ++i)
    for (Index j = 0; j < y.cols(); ++j) tp += y(i, j) && h(i, j), ys += y(i, j), hs += h(i, j);
  if (ys + hs == 0) return std::nullopt;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(ys + hs);
}

inline std::optional<double> label_margin(const ScoreMatrix& f, const LabelMatrix& y, Index i) {
  std::optional<double> best;
  for (auto u : relevant(y, i))
    for (auto v : irrelevant(y, i)) {
      const double g = f(i, u) - f(i, v);
      if (!best || g < *best) best = g;
    }
  return best;
}

inline std::optional<double> instance_margin(const ScoreMatrix& f, const LabelMatrix& y, Index j) {
  std::optional<double> best;
  for (Index a = 0; a < y.rows(); ++a)
    for (Index b = 0; b < y.rows(); ++b)
      if (y(a, j) && !y(b, j)) {
        const double g = f(a, j) - f(b, j);
        if (!best || g < *best) best = g;
      }
  return best;
}

/// Objective by direct pair enumeration with explicit weight-vector differences.
inline double objective(const limo::WeightMatrix& w, const limo::FeatureMatrix& x, const LabelMatrix& y, double l1,
                        double l2) {
  double value = 0.0;
  for (Eigen::Index k = 0; k < w.rows(); ++k)
    for (Eigen::Index j = 0; j < w.cols(); ++j) value += w(k, j) * w(k, j);
  auto dot = [&](Index j, auto&& vec) {
    double s = 0.0;
    for (Index k = 0; k < x.cols(); ++k) s += w(k, j) * vec(k);
    return s;
  };
  for (Index i = 0; i < y.rows(); ++i)
    for (auto u : relevant(y, i))
      for (auto v : irrelevant(y, i)) {
        double m = 0.0;
        for (Index k = 0; k < x.cols(); ++k) m += (w(k, u) - w(k, v)) * x(i, k);
        value += l1 * std::max(0.0, 1.0 - m);
      }
  for (Index j = 0; j < y.cols(); ++j)
    for (Index a = 0; a < y.rows(); ++a)
      for (Index b = 0; b < y.rows(); ++b)
        if (y(a, j) && !y(b, j)) {
          const double m = dot(j, [&](Index k) { return x(a, k) - x(b, k); });
          value += l2 * std::max(0.0, 1.0 - m);
        }
  return value;
}

// ---------------------------------------------------------------------------
// Fuzz generators

struct Shape {
  Index m, l;
};

inline Shape random_shape(limo::Rng& rng, Index max_m, Index max_l, Index min_m = 1, Index min_l = 1) {
  return {min_m + rng.below(max_m - min_m + 1), min_l + rng.below(max_l - min_l + 1)};
}

inline LabelMatrix random_labels(limo::Rng& rng, Shape s, double density = 0.5) {
  std::vector<std::uint8_t> bits(s.m * s.l);
  for (auto& b : bits) b = rng.uniform01() < density;
  return LabelMatrix(s.m, s.l, std::move(bits));
}

inline PredictionMatrix random_predictions(limo::Rng& rng, Shape s) {
  std::vector<std::uint8_t> bits(s.m * s.l);
  for (auto& b : bits) b = rng.below(2);
  return PredictionMatrix(s.m, s.l, std::move(bits));
}

/// Scores drawn either from a coarse grid (many ties) or continuously.
inline ScoreMatrix random_scores(limo::Rng& rng, Shape s) {
  const bool coarse = rng.below(2) == 0;
  limo::Matrix f(s.m, s.l);
  for (Index i = 0; i < s.m; ++i)
    for (Index j = 0; j < s.l; ++j)
      f(i, j) = coarse ? static_cast<double>(rng.below(4)) * 0.25 : rng.uniform(-1.0, 1.0);
  return ScoreMatrix(std::move(f));
}

inline limo::FeatureMatrix random_features(limo::Rng& rng, Index m, Index d) {
  limo::Matrix x(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < d; ++k) x(i, k) = rng.normal();
  return limo::FeatureMatrix(std::move(x));
}

}  // namespace oracle

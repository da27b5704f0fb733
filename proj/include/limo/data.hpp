#pragma once

// Core matrices and the (X, Y) dataset container.
//
// All matrices are row-major and immutable after construction. Index views
// follow the usual multi-label notation: for row i, positives(i) lists the
// relevant labels and negatives(i) the irrelevant ones; for column j,
// column_positives(j) lists the instances carrying label j.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "limo/error.hpp"

namespace limo {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = std::size_t;

namespace detail {

inline void require_finite(const Matrix& values, const char* what) {
  if (!values.allFinite()) throw ArgumentError(std::string(what) + " contains non-finite values");
}

/// Row-major grid of 0/1 entries.
class BitGrid {
 public:
  BitGrid() = default;
  BitGrid(Index rows, Index cols, std::vector<std::uint8_t> bits)
      : rows_(rows), cols_(cols), bits_(std::move(bits)) {
    require(rows_ >= 1 && cols_ >= 1, "binary matrix needs at least one row and one column");
    require(bits_.size() == rows_ * cols_, "binary matrix data size does not match its shape");
    for (auto b : bits_) require(b == 0 || b == 1, "binary matrix entries must be 0 or 1");
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool operator()(Index i, Index j) const noexcept { return bits_[i * cols_ + j] != 0; }
  std::span<const std::uint8_t> row(Index i) const { return {bits_.data() + i * cols_, cols_}; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  friend bool operator==(const BitGrid&, const BitGrid&) = default;

 protected:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace detail

/// Binary relevance matrix Y (m instances x l labels) with cached index sets.
class LabelMatrix : public detail::BitGrid {
 public:
  LabelMatrix() = default;
  LabelMatrix(Index m, Index l, std::vector<std::uint8_t> bits)
      : BitGrid(m, l, std::move(bits)) {
    row_pos_.resize(rows_);
    row_neg_.resize(rows_);
    col_pos_.resize(cols_);
    col_neg_.resize(cols_);
    for (Index i = 0; i < rows_; ++i) {
      for (Index j = 0; j < cols_; ++j) {
        if ((*this)(i, j)) {
          row_pos_[i].push_back(j);
          col_pos_[j].push_back(i);
        } else {
          row_neg_[i].push_back(j);
          col_neg_[j].push_back(i);
        }
      }
    }
  }

  static LabelMatrix from_rows(const std::vector<std::vector<int>>& rows) {
    detail::require(!rows.empty(), "label matrix needs at least one row");
    std::vector<std::uint8_t> bits;
    for (const auto& r : rows) {
      detail::require(r.size() == rows.front().size(), "ragged label rows");
      for (int v : r) bits.push_back(static_cast<std::uint8_t>(v));
    }
    return LabelMatrix(rows.size(), rows.front().size(), std::move(bits));
  }

  Index instances() const noexcept { return rows_; }
  Index labels() const noexcept { return cols_; }

  std::span<const Index> positives(Index i) const { return row_pos_[i]; }
  std::span<const Index> negatives(Index i) const { return row_neg_[i]; }
  std::span<const Index> column_positives(Index j) const { return col_pos_[j]; }
  std::span<const Index> column_negatives(Index j) const { return col_neg_[j]; }

  /// |Y+_i| * |Y-_i|
  std::size_t row_pairs(Index i) const { return row_pos_[i].size() * row_neg_[i].size(); }
  /// |Y+_j| * |Y-_j|
  std::size_t column_pairs(Index j) const { return col_pos_[j].size() * col_neg_[j].size(); }

  LabelMatrix select_rows(std::span<const Index> rows) const {
    std::vector<std::uint8_t> out;
    out.reserve(rows.size() * cols_);
    for (Index r : rows) {
      auto src = row(r);
      out.insert(out.end(), src.begin(), src.end());
    }
    return LabelMatrix(rows.size(), cols_, std::move(out));
  }

  friend bool operator==(const LabelMatrix& a, const LabelMatrix& b) {
    return static_cast<const BitGrid&>(a) == static_cast<const BitGrid&>(b);
  }

 private:
  std::vector<std::vector<Index>> row_pos_, row_neg_, col_pos_, col_neg_;
};

/// Binary classifier output H.
class PredictionMatrix : public detail::BitGrid {
 public:
  PredictionMatrix() = default;
  PredictionMatrix(Index m, Index l, std::vector<std::uint8_t> bits)
      : BitGrid(m, l, std::move(bits)) {}

  static PredictionMatrix from_rows(const std::vector<std::vector<int>>& rows) {
    auto y = LabelMatrix::from_rows(rows);
    return PredictionMatrix(y.rows(), y.cols(), y.bits());
  }
  static PredictionMatrix from_labels(const LabelMatrix& y) {
    return PredictionMatrix(y.rows(), y.cols(), y.bits());
  }
};

namespace detail {

/// Dense real matrix wrapper that rejects non-finite entries.
template <class Tag>
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(Matrix values) : values_(std::move(values)) {
    require(values_.rows() >= 1 && values_.cols() >= 1, std::string(Tag::name) + " must be non-empty");
    require_finite(values_, Tag::name);
  }

  static RealMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    require(!rows.empty() && !rows.front().empty(), std::string(Tag::name) + " must be non-empty");
    Matrix v(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == rows.front().size(), std::string("ragged rows in ") + Tag::name);
      for (std::size_t j = 0; j < rows[i].size(); ++j) v(i, j) = rows[i][j];
    }
    return RealMatrix(std::move(v));
  }

  Index rows() const noexcept { return static_cast<Index>(values_.rows()); }
  Index cols() const noexcept { return static_cast<Index>(values_.cols()); }
  double operator()(Index i, Index j) const { return values_(i, j); }
  std::span<const double> row(Index i) const { return {values_.data() + i * cols(), cols()}; }
  const Matrix& values() const noexcept { return values_; }

  RealMatrix select_rows(std::span<const Index> rows) const {
    Matrix out(rows.size(), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = values_.row(rows[r]);
    return RealMatrix(std::move(out));
  }

  friend bool operator==(const RealMatrix& a, const RealMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

struct ScoreTag {
  static constexpr const char* name = "score matrix";
};
struct FeatureTag {
  static constexpr const char* name = "feature matrix";
};

}  // namespace detail

/// Real-valued predictor output F; entry (i, j) is the confidence f_j(x_i).
using ScoreMatrix = detail::RealMatrix<detail::ScoreTag>;
/// Instance matrix X (m x d).
using FeatureMatrix = detail::RealMatrix<detail::FeatureTag>;

struct Dataset {
  FeatureMatrix features;
  LabelMatrix labels;

  Dataset() = default;
  Dataset(FeatureMatrix x, LabelMatrix y) : features(std::move(x)), labels(std::move(y)) {
    detail::require(features.rows() == labels.rows(),
                    "feature and label matrices have different instance counts");
  }

  Index instances() const noexcept { return labels.rows(); }
  Index dimension() const noexcept { return features.cols(); }
  Index label_count() const noexcept { return labels.cols(); }

  Dataset select_rows(std::span<const Index> rows) const {
    return Dataset(features.select_rows(rows), labels.select_rows(rows));
  }

  /// Copy with a constant 1 appended to every instance vector.
  Dataset with_bias_feature() const {
    Matrix x(features.rows(), features.cols() + 1);
    x.leftCols(features.cols()) = features.values();
    x.col(features.cols()).setOnes();
    return Dataset(FeatureMatrix(std::move(x)), labels);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline void require_same_shape(const detail::BitGrid& a, const detail::BitGrid& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix shapes do not match");
}

inline void require_same_shape(const ScoreMatrix& f, const detail::BitGrid& y) {
  detail::require(f.rows() == y.rows() && f.cols() == y.cols(),
                  "score matrix shape does not match label matrix");
}

}  // namespace limo

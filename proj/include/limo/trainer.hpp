#pragma once

// Linear max-margin learner over both margin families.
//
// Objective (hinge form):
//
//   sum_j ||w_j||^2
//     + lambda1 * sum_i sum_{(u,v) in Y+_i x Y-_i} max(0, 1 - (w_u - w_v)^T x_i)
//     + lambda2 * sum_j sum_{(a,b) in Y+_j x Y-_j} max(0, 1 - w_j^T (x_a - x_b))
//
// Training is plain SGD with a fixed step and iterate averaging. Each
// iteration samples one label-wise triplet (instance weighted by
// |Y+_i||Y-_i|, then a uniform relevant/irrelevant label pair) and one
// instance-wise triplet (label weighted by |Y+_j||Y-_j|, then a uniform
// positive/negative instance pair). A triplet whose hinge is active moves
// the touched columns by -eta * (margin gradient + w); inactive triplets
// leave W unchanged. The label-wise step runs first and the instance-wise
// step sees its result.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "limo/data.hpp"
#include "limo/random.hpp"

namespace limo {

/// d x l weights, column j is w_j.
using WeightMatrix = Eigen::MatrixXd;

struct TrainConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double eta = 0.01;
  std::size_t iters = 100000;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(std::isfinite(lambda1) && lambda1 >= 0.0, "lambda1 must be a non-negative number");
    detail::require(std::isfinite(lambda2) && lambda2 >= 0.0, "lambda2 must be a non-negative number");
    detail::require(lambda1 > 0.0 || lambda2 > 0.0, "lambda1 and lambda2 cannot both be zero");
    detail::require(std::isfinite(eta) && eta > 0.0, "eta must be positive");
    detail::require(iters >= 1, "iters must be at least 1");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct LinearModel {
  WeightMatrix weights;
  TrainConfig config;

  Index dimension() const { return static_cast<Index>(weights.rows()); }
  Index labels() const { return static_cast<Index>(weights.cols()); }

  friend bool operator==(const LinearModel& a, const LinearModel& b) {
    return a.config == b.config && a.weights.rows() == b.weights.rows() && a.weights.cols() == b.weights.cols() &&
           a.weights == b.weights;
  }
};

/// F = X W, i.e. f_j(x_i) = w_j^T x_i.
inline ScoreMatrix predict_scores(const LinearModel& model, const FeatureMatrix& x) {
  detail::require(x.cols() == model.dimension(), "feature dimension " + std::to_string(x.cols()) +
                                                     " does not match model dimension " +
                                                     std::to_string(model.dimension()));
  Matrix f = x.values() * model.weights;
  return ScoreMatrix(std::move(f));
}

// ---------------------------------------------------------------------------
// Sampling

struct SamplingWeights {
  std::vector<double> per_instance;  // |Y+_i||Y-_i| / sum
  std::vector<double> per_label;     // |Y+_j||Y-_j| / sum
};

/// Normalised pair counts. A side with no pairs is all zeros; it is an error
/// only when that side is required.
inline SamplingWeights sampling_weights(const LabelMatrix& y, bool require_instances = true,
                                        bool require_labels = true) {
  SamplingWeights w;
  std::uint64_t row_total = 0, col_total = 0;
  for (Index i = 0; i < y.rows(); ++i) row_total += y.row_pairs(i);
  for (Index j = 0; j < y.cols(); ++j) col_total += y.column_pairs(j);
  if (require_instances && row_total == 0)
    throw SetupError("no instance has both a relevant and an irrelevant label");
  if (require_labels && col_total == 0) throw SetupError("no label has both a positive and a negative instance");
  w.per_instance.resize(y.rows(), 0.0);
  w.per_label.resize(y.cols(), 0.0);
  for (Index i = 0; i < y.rows() && row_total; ++i)
    w.per_instance[i] = static_cast<double>(y.row_pairs(i)) / static_cast<double>(row_total);
  for (Index j = 0; j < y.cols() && col_total; ++j)
    w.per_label[j] = static_cast<double>(y.column_pairs(j)) / static_cast<double>(col_total);
  return w;
}

/// (instance, relevant label, irrelevant label)
struct LabelTriplet {
  Index instance, relevant, irrelevant;
  friend bool operator==(const LabelTriplet&, const LabelTriplet&) = default;
};

/// (label, positive instance, negative instance)
struct InstanceTriplet {
  Index label, positive, negative;
  friend bool operator==(const InstanceTriplet&, const InstanceTriplet&) = default;
};

/// Draws triplets with the weights above. Sampling uses integer cumulative
/// pair counts, so rows/columns without pairs are never selected.
class TripletSampler {
 public:
  explicit TripletSampler(const LabelMatrix& y) : y_(&y) {
    std::uint64_t acc = 0;
    for (Index i = 0; i < y.rows(); ++i) row_cum_.push_back(acc += y.row_pairs(i));
    acc = 0;
    for (Index j = 0; j < y.cols(); ++j) col_cum_.push_back(acc += y.column_pairs(j));
  }

  bool has_label_triplets() const { return row_cum_.back() > 0; }
  bool has_instance_triplets() const { return col_cum_.back() > 0; }

  LabelTriplet sample_label_triplet(Rng& rng) const {
    const Index i = pick(row_cum_, rng);
    auto pos = y_->positives(i);
    auto neg = y_->negatives(i);
    const Index u = pos[rng.below(pos.size())];
    const Index v = neg[rng.below(neg.size())];
    return {i, u, v};
  }

  InstanceTriplet sample_instance_triplet(Rng& rng) const {
    const Index j = pick(col_cum_, rng);
    auto pos = y_->column_positives(j);
    auto neg = y_->column_negatives(j);
    const Index a = pos[rng.below(pos.size())];
    const Index b = neg[rng.below(neg.size())];
    return {j, a, b};
  }

 private:
  static Index pick(const std::vector<std::uint64_t>& cum, Rng& rng) {
    const std::uint64_t r = rng.below(cum.back());
    return static_cast<Index>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
  }

  const LabelMatrix* y_;
  std::vector<std::uint64_t> row_cum_, col_cum_;
};

// ---------------------------------------------------------------------------
// Single steps

namespace trainer_detail {
inline auto instance_row(const FeatureMatrix& x, Index i) { return x.values().row(static_cast<Eigen::Index>(i)); }
}  // namespace trainer_detail

inline bool label_hinge_active(const WeightMatrix& w, const FeatureMatrix& x, const LabelTriplet& t) {
  auto xi = trainer_detail::instance_row(x, t.instance).transpose();
  return 1.0 - w.col(t.relevant).dot(xi) + w.col(t.irrelevant).dot(xi) > 0.0;
}

inline bool instance_hinge_active(const WeightMatrix& w, const FeatureMatrix& x, const InstanceTriplet& t) {
  auto wj = w.col(t.label);
  return 1.0 - wj.dot(trainer_detail::instance_row(x, t.positive).transpose()) +
             wj.dot(trainer_detail::instance_row(x, t.negative).transpose()) >
         0.0;
}

/// Update direction of one step, split into its margin and weight-decay parts.
struct StepTerms {
  WeightMatrix margin;
  WeightMatrix regularizer;

  StepTerms(Index d, Index l) : margin(WeightMatrix::Zero(d, l)), regularizer(WeightMatrix::Zero(d, l)) {}
};

/// Adds the direction of a label-wise step at W to `acc`; returns whether the hinge fired.
inline bool add_label_step_direction(const WeightMatrix& w, const FeatureMatrix& x, const LabelTriplet& t,
                                     double lambda1, StepTerms& acc) {
  if (!label_hinge_active(w, x, t)) return false;
  auto xi = trainer_detail::instance_row(x, t.instance).transpose();
  acc.margin.col(t.relevant) -= lambda1 * xi;
  acc.margin.col(t.irrelevant) += lambda1 * xi;
  acc.regularizer.col(t.relevant) += w.col(t.relevant);
  acc.regularizer.col(t.irrelevant) += w.col(t.irrelevant);
  return true;
}

inline bool add_instance_step_direction(const WeightMatrix& w, const FeatureMatrix& x, const InstanceTriplet& t,
                                        double lambda2, StepTerms& acc) {
  if (!instance_hinge_active(w, x, t)) return false;
  acc.margin.col(t.label) += lambda2 * (trainer_detail::instance_row(x, t.negative) -
                                        trainer_detail::instance_row(x, t.positive))
                                           .transpose();
  acc.regularizer.col(t.label) += w.col(t.label);
  return true;
}

/// W^0 with entries ~ N(0, sd = 1/sqrt(d)), filled column by column.
inline WeightMatrix initial_weights(Index d, Index l, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, Stream::init);
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  WeightMatrix w(d, l);
  for (Index j = 0; j < l; ++j)
    for (Index k = 0; k < d; ++k) w(k, j) = rng.normal(0.0, sd);
  return w;
}

/// Observer for training progress: called after every iteration with the
/// 1-based iteration number and the current (non-averaged) iterate.
using IterationHook = std::function<void(std::size_t, const WeightMatrix&)>;

inline LinearModel train(const Dataset& data, const TrainConfig& cfg, const IterationHook& hook = {}) {
  cfg.validate();
  const auto& x = data.features;
  const auto& y = data.labels;
  const bool label_side = cfg.lambda1 > 0.0, instance_side = cfg.lambda2 > 0.0;
  sampling_weights(y, label_side, instance_side);
  TripletSampler sampler(y);

  const Index d = x.cols(), l = y.cols();
  WeightMatrix w = initial_weights(d, l, cfg.seed);
  Rng label_rng = Rng::substream(cfg.seed, Stream::label_triplets);
  Rng instance_rng = Rng::substream(cfg.seed, Stream::instance_triplets);

  // Lazy iterate averaging: column k has held its current value since
  // iteration since[k]; its contribution is folded in when it changes.
  WeightMatrix sum = WeightMatrix::Zero(d, l);
  std::vector<std::size_t> since(l, 1);
  auto retire = [&](Index k, std::size_t t) {
    sum.col(k) += static_cast<double>(t - since[k]) * w.col(k);
    since[k] = t;
  };
  auto check = [&](Index k, std::size_t t) {
    if (!w.col(k).allFinite())
      throw NumericError("non-finite weight in column " + std::to_string(k) + " at iteration " + std::to_string(t));
  };

  for (std::size_t t = 1; t <= cfg.iters; ++t) {
    if (label_side) {
      const auto tr = sampler.sample_label_triplet(label_rng);
      if (label_hinge_active(w, x, tr)) {
        auto xi = trainer_detail::instance_row(x, tr.instance).transpose();
        retire(tr.relevant, t);
        retire(tr.irrelevant, t);
        w.col(tr.relevant) -= cfg.eta * (-cfg.lambda1 * xi + w.col(tr.relevant));
        w.col(tr.irrelevant) -= cfg.eta * (cfg.lambda1 * xi + w.col(tr.irrelevant));
        check(tr.relevant, t);
        check(tr.irrelevant, t);
      }
    }
    if (instance_side) {
      const auto tr = sampler.sample_instance_triplet(instance_rng);
      if (instance_hinge_active(w, x, tr)) {
        retire(tr.label, t);
        auto diff = (trainer_detail::instance_row(x, tr.negative) - trainer_detail::instance_row(x, tr.positive))
                        .transpose();
        w.col(tr.label) -= cfg.eta * (cfg.lambda2 * diff + w.col(tr.label));
        check(tr.label, t);
      }
    }
    if (hook) hook(t, w);
  }
  for (Index k = 0; k < l; ++k) retire(k, cfg.iters + 1);
  return LinearModel{sum / static_cast<double>(cfg.iters), cfg};
}

// ---------------------------------------------------------------------------
// Objective and its subgradient

inline void require_training_shapes(const WeightMatrix& w, const FeatureMatrix& x, const LabelMatrix& y) {
  detail::require(x.rows() == y.rows(), "feature and label matrices have different instance counts");
  detail::require(static_cast<Index>(w.rows()) == x.cols(), "weight rows must equal the feature dimension");
  detail::require(static_cast<Index>(w.cols()) == y.cols(), "weight columns must equal the label count");
}

inline double objective_value(const WeightMatrix& w, const FeatureMatrix& x, const LabelMatrix& y, double lambda1,
                              double lambda2) {
  require_training_shapes(w, x, y);
  const Matrix s = x.values() * w;
  double label_loss = 0.0, instance_loss = 0.0;
  for (Index i = 0; i < y.rows(); ++i)
    for (auto u : y.positives(i))
      for (auto v : y.negatives(i)) label_loss += std::max(0.0, 1.0 - (s(i, u) - s(i, v)));
  for (Index j = 0; j < y.cols(); ++j)
    for (auto a : y.column_positives(j))
      for (auto b : y.column_negatives(j)) instance_loss += std::max(0.0, 1.0 - (s(a, j) - s(b, j)));
  return w.squaredNorm() + lambda1 * label_loss + lambda2 * instance_loss;
}

/// The three parts of the subgradient: 2W, and the unweighted hinge sums
/// phi1 (label-wise pairs) and phi2 (instance-wise pairs); the total is
/// regularizer + lambda1 * label_term + lambda2 * instance_term.
struct SubgradientTerms {
  WeightMatrix regularizer;
  WeightMatrix label_term;
  WeightMatrix instance_term;

  WeightMatrix total(double lambda1, double lambda2) const {
    return regularizer + lambda1 * label_term + lambda2 * instance_term;
  }
};

inline SubgradientTerms subgradient_terms(const WeightMatrix& w, const FeatureMatrix& x, const LabelMatrix& y) {
  require_training_shapes(w, x, y);
  const Matrix s = x.values() * w;
  // Per-cell coefficients: phi = X^T C.
  Matrix label_coef = Matrix::Zero(y.rows(), y.cols());
  Matrix instance_coef = Matrix::Zero(y.rows(), y.cols());
  for (Index i = 0; i < y.rows(); ++i)
    for (auto u : y.positives(i))
      for (auto v : y.negatives(i))
        if (1.0 - (s(i, u) - s(i, v)) > 0.0) {
          label_coef(i, u) -= 1.0;
          label_coef(i, v) += 1.0;
        }
  for (Index j = 0; j < y.cols(); ++j)
    for (auto a : y.column_positives(j))
      for (auto b : y.column_negatives(j))
        if (1.0 - (s(a, j) - s(b, j)) > 0.0) {
          instance_coef(a, j) -= 1.0;
          instance_coef(b, j) += 1.0;
        }
  return {2.0 * w, x.values().transpose() * label_coef, x.values().transpose() * instance_coef};
}

inline WeightMatrix full_subgradient(const WeightMatrix& w, const FeatureMatrix& x, const LabelMatrix& y,
                                     double lambda1, double lambda2) {
  return subgradient_terms(w, x, y).total(lambda1, lambda2);
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["eta"] = c.eta;
  j["iters"] = c.iters;
  j["seed"] = c.seed;
  return j;
}

inline TrainConfig train_config_from_json(const nlohmann::ordered_json& j) {
  TrainConfig c;
  c.lambda1 = j.at("lambda1").get<double>();
  c.lambda2 = j.at("lambda2").get<double>();
  c.eta = j.at("eta").get<double>();
  c.iters = j.at("iters").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

inline constexpr int model_format_version = 1;

/// {"format", "version", "d", "l", "config", "weights"} with weights stored
/// row-major (d rows of l values).
inline nlohmann::ordered_json to_json(const LinearModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "limo-linear-model";
  j["version"] = model_format_version;
  j["d"] = m.dimension();
  j["l"] = m.labels();
  j["config"] = to_json(m.config);
  auto& wj = j["weights"] = nlohmann::ordered_json::array();
  for (Index k = 0; k < m.dimension(); ++k)
    for (Index c = 0; c < m.labels(); ++c) wj.push_back(m.weights(k, c));
  return j;
}

inline LinearModel linear_model_from_json(const nlohmann::ordered_json& j) {
  if (j.value("format", "") != "limo-linear-model") throw DataError("not a linear model document");
  if (j.at("version").get<int>() != model_format_version) throw DataError("unsupported model format version");
  const auto d = j.at("d").get<Index>(), l = j.at("l").get<Index>();
  const auto& wj = j.at("weights");
  if (wj.size() != d * l) throw DataError("weight array has the wrong length");
  LinearModel m{WeightMatrix(d, l), train_config_from_json(j.at("config"))};
  for (Index k = 0; k < d; ++k)
    for (Index c = 0; c < l; ++c) m.weights(k, c) = wj[k * l + c].get<double>();
  if (!m.weights.allFinite()) throw DataError("model holds non-finite weights");
  return m;
}

}  // namespace limo

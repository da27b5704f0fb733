#include <gtest/gtest.h>

#include <algorithm>

#include "oracle.hpp"

using namespace limo;

namespace {

const LabelMatrix worked_labels = LabelMatrix::from_rows({{1, 0, 1}, {0, 1, 0}});

Dataset random_dataset(std::uint64_t seed, Index m, Index d, Index l) {
  Rng rng(seed);
  return Dataset(oracle::random_features(rng, m, d), oracle::random_labels(rng, {m, l}));
}

double relative_gap(const WeightMatrix& a, const WeightMatrix& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace

TEST(Sampling, WorkedWeights) {
  const auto w = sampling_weights(worked_labels);
  EXPECT_EQ(w.per_instance, (std::vector<double>{0.5, 0.5}));
  for (double v : w.per_label) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  const auto z = sampling_weights(LabelMatrix::from_rows({{1, 1}, {1, 0}}));
  EXPECT_EQ(z.per_instance[0], 0.0);
  EXPECT_EQ(z.per_instance[1], 1.0);
}

TEST(Sampling, NoPairsOnAnActiveSideIsASetupError) {
  const auto ones = LabelMatrix::from_rows({{1, 1}, {1, 1}});
  EXPECT_THROW(sampling_weights(ones), SetupError);
  const auto diagonal = LabelMatrix::from_rows({{1, 0}, {1, 0}});  // rows have pairs, columns do not
  EXPECT_THROW(sampling_weights(diagonal), SetupError);
  EXPECT_NO_THROW(sampling_weights(diagonal, true, false));
  Dataset d(FeatureMatrix::from_rows({{1.0}, {2.0}}), diagonal);
  EXPECT_THROW(train(d, {1.0, 1.0, 0.01, 10, 0}), SetupError);
  EXPECT_NO_THROW(train(d, {1.0, 0.0, 0.01, 10, 0}));
}

TEST(Sampling, DegenerateRowsAndColumnsAreNeverDrawn) {
  const auto y = LabelMatrix::from_rows({{1, 1, 1}, {1, 0, 0}, {0, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  TripletSampler sampler(y);
  Rng rng(3);
  std::vector<std::size_t> row_hits(5), col_hits(3);
  for (int k = 0; k < 100000; ++k) {
    const auto a = sampler.sample_label_triplet(rng);
    ++row_hits[a.instance];
    ASSERT_TRUE(y(a.instance, a.relevant));
    ASSERT_FALSE(y(a.instance, a.irrelevant));
    const auto b = sampler.sample_instance_triplet(rng);
    ++col_hits[b.label];
    ASSERT_TRUE(y(b.positive, b.label));
    ASSERT_FALSE(y(b.negative, b.label));
  }
  EXPECT_EQ(row_hits[0], 0u);
  EXPECT_EQ(row_hits[2], 0u);
  EXPECT_GT(row_hits[1], 0u);
  // Row weights 2:2:2 over rows 1, 3, 4.
  EXPECT_NEAR(row_hits[1] / 1e5, 1.0 / 3.0, 0.01);
  for (auto c : col_hits) EXPECT_GT(c, 0u);
}

TEST(Objective, ZeroWeightsCountEveryPair) {
  const auto d = random_dataset(1, 7, 3, 4);
  std::size_t label_pairs = 0, instance_pairs = 0;
  for (Index i = 0; i < 7; ++i) label_pairs += d.labels.row_pairs(i);
  for (Index j = 0; j < 4; ++j) instance_pairs += d.labels.column_pairs(j);
  const WeightMatrix w = WeightMatrix::Zero(3, 4);
  EXPECT_DOUBLE_EQ(objective_value(w, d.features, d.labels, 2.0, 3.0), 2.0 * label_pairs + 3.0 * instance_pairs);
}

TEST(Objective, SeparatingWeightsLeaveOnlyTheRegularizer) {
  const auto x = FeatureMatrix::from_rows({{1, 0}, {0, 1}});
  WeightMatrix w(2, 3);
  w << 1, -1, 1, -1, 1, -1;
  EXPECT_DOUBLE_EQ(objective_value(w, x, worked_labels, 5.0, 7.0), 6.0);
  EXPECT_EQ(full_subgradient(w, x, worked_labels, 5.0, 7.0), 2.0 * w);
}

TEST(Objective, MatchesPairEnumeration) {
  Rng rng(17);
  for (int c = 0; c < 100; ++c) {
    const auto s = oracle::random_shape(rng, 8, 4, 1, 1);
    const Index d = 1 + rng.below(4);
    const auto x = oracle::random_features(rng, s.m, d);
    const auto y = oracle::random_labels(rng, s);
    WeightMatrix w(d, s.l);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.normal();
    const double expected = oracle::objective(w, x, y, 1.5, 0.5);
    EXPECT_NEAR(objective_value(w, x, y, 1.5, 0.5), expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(Objective, ShapeMismatch) {
  const auto x = FeatureMatrix::from_rows({{1, 0}, {0, 1}});
  EXPECT_THROW(objective_value(WeightMatrix::Zero(3, 3), x, worked_labels, 1, 1), ArgumentError);
  EXPECT_THROW(full_subgradient(WeightMatrix::Zero(2, 2), x, worked_labels, 1, 1), ArgumentError);
}

TEST(Subgradient, SingleActiveLabelPair) {
  // One instance, labels (relevant, irrelevant); instance-wise terms need two rows, so none here.
  const auto x = FeatureMatrix::from_rows({{2.0, -1.0}});
  const auto y = LabelMatrix::from_rows({{1, 0}});
  const WeightMatrix w = WeightMatrix::Zero(2, 2);
  const auto t = subgradient_terms(w, x, y);
  EXPECT_EQ(t.label_term.col(0), -Eigen::Vector2d(2.0, -1.0));
  EXPECT_EQ(t.label_term.col(1), Eigen::Vector2d(2.0, -1.0));
  EXPECT_TRUE(t.instance_term.isZero());
}

TEST(Subgradient, MatchesCentralDifferences) {
  Rng rng(29);
  int checked = 0;
  for (int c = 0; c < 50; ++c) {
    const auto d = random_dataset(100 + c, 6, 3, 3);
    WeightMatrix w(3, 3), dir(3, 3);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.normal(), dir.data()[k] = rng.normal();
    const double h = 1e-6;
    const double fd =
        (objective_value(w + h * dir, d.features, d.labels, 1.3, 0.7) -
         objective_value(w - h * dir, d.features, d.labels, 1.3, 0.7)) /
        (2 * h);
    // Skip points where a hinge sits within the difference step.
    const Matrix s = d.features.values() * w;
    const Matrix ds = d.features.values() * dir;
    bool near_kink = false;
    for (Index i = 0; i < 6; ++i)
      for (auto u : d.labels.positives(i))
        for (auto v : d.labels.negatives(i))
          near_kink |= std::abs(1 - (s(i, u) - s(i, v))) < 1e-4 * (1 + std::abs(ds(i, u) - ds(i, v)));
    for (Index j = 0; j < 3; ++j)
      for (auto a : d.labels.column_positives(j))
        for (auto b : d.labels.column_negatives(j))
          near_kink |= std::abs(1 - (s(a, j) - s(b, j))) < 1e-4 * (1 + std::abs(ds(a, j) - ds(b, j)));
    if (near_kink) continue;
    const double analytic = (full_subgradient(w, d.features, d.labels, 1.3, 0.7).array() * dir.array()).sum();
    EXPECT_NEAR(fd, analytic, 1e-5 * std::max(1.0, std::abs(analytic)));
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(Steps, InactiveHingeLeavesTheAccumulatorAlone) {
  const auto x = FeatureMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  WeightMatrix w(2, 3);
  w << 1, -1, 1, -1, 1, -1;
  StepTerms acc(2, 3);
  EXPECT_FALSE(add_label_step_direction(w, x, {0, 0, 1}, 1.0, acc));
  EXPECT_FALSE(add_instance_step_direction(w, x, {0, 0, 1}, 1.0, acc));
  EXPECT_TRUE(acc.margin.isZero());
  EXPECT_TRUE(acc.regularizer.isZero());
  const WeightMatrix zero = WeightMatrix::Zero(2, 3);
  EXPECT_TRUE(add_label_step_direction(zero, x, {0, 0, 1}, 2.0, acc));
  EXPECT_EQ(acc.margin(0, 0), -2.0);
  EXPECT_EQ(acc.margin(0, 1), 2.0);
}

TEST(Predict, LinearMap) {
  LinearModel zero{WeightMatrix::Zero(2, 3), {}};
  const auto x = FeatureMatrix::from_rows({{1.0, 2.0}});
  EXPECT_TRUE(predict_scores(zero, x).values().isZero());
  LinearModel scalar{WeightMatrix::Constant(1, 1, 3.0), {}};
  EXPECT_EQ(predict_scores(scalar, FeatureMatrix::from_rows({{2.0}}))(0, 0), 6.0);
  WeightMatrix w(2, 2);
  w << 1, 2, 3, 4;
  const auto f = predict_scores({w, {}}, FeatureMatrix::from_rows({{1, 0}, {0, 1}}));
  EXPECT_EQ(f(1, 0), 3.0);
  EXPECT_EQ(f(0, 1), 2.0);
  EXPECT_THROW(predict_scores(zero, FeatureMatrix::from_rows({{1.0}})), ArgumentError);
}

TEST(Train, ConfigValidation) {
  const auto d = random_dataset(2, 5, 2, 3);
  EXPECT_THROW(train(d, {0.0, 0.0, 0.01, 10, 0}), ArgumentError);
  EXPECT_THROW(train(d, {1.0, 1.0, 0.0, 10, 0}), ArgumentError);
  EXPECT_THROW(train(d, {1.0, 1.0, 0.01, 0, 0}), ArgumentError);
  EXPECT_THROW(train(d, {-1.0, 1.0, 0.01, 10, 0}), ArgumentError);
}

TEST(Train, DeterministicAndSeedSensitive) {
  const auto d = synth_quadrant(300, 5).with_bias_feature();
  const TrainConfig cfg{10.0, 10.0, 0.01, 5000, 42};
  const auto a = train(d, cfg), b = train(d, cfg);
  EXPECT_EQ(a, b);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  auto other = cfg;
  other.seed = 43;
  EXPECT_FALSE(a == train(d, other));
}

TEST(Train, InitialisationScale) {
  const auto w = initial_weights(400, 50, 3);
  const double var = w.squaredNorm() / static_cast<double>(w.size());
  EXPECT_NEAR(var, 1.0 / 400.0, 0.1 / 400.0);
}

TEST(Train, LazyAverageEqualsTheMeanOfIterates) {
  const auto d = random_dataset(7, 12, 3, 4);
  const TrainConfig cfg{2.0, 3.0, 0.05, 2000, 9};
  WeightMatrix sum = WeightMatrix::Zero(3, 4);
  const auto model = train(d, cfg, [&](std::size_t, const WeightMatrix& w) { sum += w; });
  EXPECT_LT(relative_gap(model.weights, sum / 2000.0), 1e-12);
}

TEST(Train, FirstIterationFollowsTheUpdateRule) {
  const auto d = random_dataset(8, 6, 2, 3);
  const TrainConfig cfg{1.5, 0.0, 0.1, 1, 4};
  const auto w0 = initial_weights(2, 3, cfg.seed);
  Rng label_rng = Rng::substream(cfg.seed, Stream::label_triplets);
  const auto t = TripletSampler(d.labels).sample_label_triplet(label_rng);
  WeightMatrix expected = w0;
  const Eigen::Vector2d xi = d.features.values().row(t.instance).transpose();
  if (1.0 - w0.col(t.relevant).dot(xi) + w0.col(t.irrelevant).dot(xi) > 0) {
    expected.col(t.relevant) -= cfg.eta * (-cfg.lambda1 * xi + w0.col(t.relevant));
    expected.col(t.irrelevant) -= cfg.eta * (cfg.lambda1 * xi + w0.col(t.irrelevant));
  }
  EXPECT_EQ(train(d, cfg).weights, expected);
}

TEST(Train, NonFiniteWeightsAreReported) {
  Matrix x(2, 1);
  x << 1e200, -1e200;
  Dataset d{FeatureMatrix(x), LabelMatrix::from_rows({{1, 0}, {0, 1}})};
  try {
    train(d, {1e200, 1e200, 1e200, 100, 0});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
  }
}

TEST(Train, ObjectiveDecreasesWithMoreIterations) {
  const auto d = synth_quadrant(400, 11).with_bias_feature();
  std::vector<double> early, late;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TrainConfig full{100.0, 100.0, 0.01, 20000, seed};
    auto tenth = full;
    tenth.iters = full.iters / 10;
    late.push_back(objective_value(train(d, full).weights, d.features, d.labels, 100.0, 100.0));
    early.push_back(objective_value(train(d, tenth).weights, d.features, d.labels, 100.0, 100.0));
  }
  std::sort(early.begin(), early.end());
  std::sort(late.begin(), late.end());
  EXPECT_LT(late[5], early[5]);
}

TEST(Train, QuadrantRankingLossWithBothMargins) {
  const auto data = synth_quadrant(2000, 13).with_bias_feature();
  const auto [tr, te] = split(data, {0.7, 1});
  const auto model = train(tr, {100.0, 100.0, 0.01, 200000, 3});
  EXPECT_LT(ranking_loss(predict_scores(model, te.features), te.labels), 0.05);
}

TEST(ModelJson, RoundTripIsExact) {
  const auto d = random_dataset(3, 10, 4, 3);
  const auto model = train(d, {0.3, 2.5, 0.02, 300, 77});
  const auto text = to_json(model).dump();
  const auto back = linear_model_from_json(nlohmann::ordered_json::parse(text));
  EXPECT_EQ(back, model);
  auto broken = nlohmann::ordered_json::parse(text);
  broken["version"] = 2;
  EXPECT_THROW(linear_model_from_json(broken), DataError);
  broken = nlohmann::ordered_json::parse(text);
  broken["weights"].erase(0);
  EXPECT_THROW(linear_model_from_json(broken), DataError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracle.hpp"

using namespace limo;

namespace {

ExperimentPlan small_plan(std::size_t replicates = 2) {
  ExperimentPlan p;
  p.dataset.n = 200;
  p.dataset.seed = 5;
  p.variants = {{"LIMO-inst", 0.0, 10.0}, {"LIMO-label", 10.0, 0.0}, {"LIMO", 10.0, 10.0}};
  p.replicates = replicates;
  p.split = {0.5, 3};
  p.iters = 3000;
  p.train_seed = 8;
  return p;
}

}  // namespace

TEST(Rescale, WorkedValues) {
  const std::vector<double> loss{0.027, 0.015, 0.015};
  const auto r = rescale_relative(loss, true);
  EXPECT_DOUBLE_EQ(r.values[0], 0.0);
  EXPECT_DOUBLE_EQ(r.values[1], 1.0);
  EXPECT_DOUBLE_EQ(r.values[2], 1.0);
  EXPECT_FALSE(r.all_equal);
  const std::vector<double> gain{0.2, 0.8};
  EXPECT_EQ(rescale_relative(gain, false).values, (std::vector<double>{0.0, 1.0}));
  const std::vector<double> same{0.5, 0.5};
  const auto s = rescale_relative(same, false);
  EXPECT_EQ(s.values, (std::vector<double>{1.0, 1.0}));
  EXPECT_TRUE(s.all_equal);
  const std::vector<double> one{0.5};
  EXPECT_THROW(rescale_relative(one, false), ArgumentError);
}

TEST(Rescale, StaysInTheUnitInterval) {
  Rng rng(3);
  for (int c = 0; c < 200; ++c) {
    std::vector<double> v(2 + rng.below(5));
    for (auto& x : v) x = rng.uniform(-2, 2);
    const auto r = rescale_relative(v, c % 2 == 0);
    EXPECT_EQ(*std::min_element(r.values.begin(), r.values.end()), 0.0);
    EXPECT_EQ(*std::max_element(r.values.begin(), r.values.end()), 1.0);
  }
}

TEST(Ranks, WorkedValues) {
  // One method ranked (1, 1, 1, 2, 2) over five datasets.
  const std::vector<std::vector<double>> table{{0.1, 0.2}, {0.1, 0.3}, {0.2, 0.4}, {0.5, 0.4}, {0.6, 0.1}};
  EXPECT_DOUBLE_EQ(average_ranks(table, true)[0], 1.4);
  EXPECT_EQ(average_ranks({{3.0, 1.0, 2.0}}, true), (std::vector<double>{3.0, 1.0, 2.0}));
  EXPECT_EQ(average_ranks({{0.9, 0.9, 0.1}}, false), (std::vector<double>{1.5, 1.5, 3.0}));
  EXPECT_THROW(average_ranks({}, true), ArgumentError);
}

TEST(Ranks, RowSumsAndRange) {
  Rng rng(4);
  for (int c = 0; c < 100; ++c) {
    const std::size_t k = 2 + rng.below(4);
    std::vector<std::vector<double>> table(1 + rng.below(5), std::vector<double>(k));
    for (auto& row : table)
      for (auto& v : row) v = static_cast<double>(rng.below(3));
    for (const auto& row : table) {
      const auto r = mean_ranks(row, false);
      EXPECT_DOUBLE_EQ(std::accumulate(r.begin(), r.end(), 0.0), k * (k + 1) / 2.0);
    }
    for (double r : average_ranks(table, true)) {
      EXPECT_GE(r, 1.0);
      EXPECT_LE(r, static_cast<double>(k));
    }
  }
}

TEST(Plan, ParsesAndValidates) {
  const auto j = nlohmann::ordered_json::parse(R"js({
    "dataset": {"kind": "synthetic", "n": 100, "seed": 1},
    "variants": [{"name": "LIMO", "lambda1": 1, "lambda2": 2, "thresholds": ["t(x)"]}],
    "replicates": 3,
    "split": {"train_fraction": 0.6, "seed": 4},
    "train": {"eta": 0.05, "iters": 100, "seed": 9},
    "measures": ["ranking_loss", "hamming_loss"]
  })js");
  const auto p = plan_from_json(j);
  EXPECT_EQ(p.variants[0].pairings, (std::vector<Pairing>{Pairing::per_instance}));
  EXPECT_EQ(p.measures.size(), 2u);
  EXPECT_EQ(p.split.seed, 4u);
  EXPECT_TRUE(p.bias_feature);
  EXPECT_EQ(plan_from_json(to_json(p)).measures, p.measures);

  auto bad = j;
  bad["variants"][0]["name"] = "LIMO-inst";
  EXPECT_THROW(plan_from_json(bad), ArgumentError);
  bad = j;
  bad["measures"] = {"accuracy"};
  EXPECT_THROW(plan_from_json(bad), ArgumentError);
  bad = j;
  bad["replicates"] = 0;
  EXPECT_THROW(plan_from_json(bad), ArgumentError);
  bad = j;
  bad.erase("variants");
  EXPECT_THROW(plan_from_json(bad), ArgumentError);
}

TEST(Experiment, SingleCellReport) {
  auto p = small_plan(1);
  p.variants = {{"LIMO", 10.0, 10.0, {Pairing::per_label}}};
  const auto r = run_experiment(p);
  EXPECT_EQ(r.cells.size(), all_measures.size());
  for (const auto& s : r.summary) {
    EXPECT_EQ(s.stats.n, 1u);
    EXPECT_EQ(s.stats.std, 0.0);
    EXPECT_FALSE(s.relative.has_value());
  }
  EXPECT_TRUE(r.errors.empty());
}

TEST(Experiment, DeterministicAcrossSchedules) {
  auto p = small_plan(3);
  const auto a = run_experiment(p);
  const auto b = run_experiment(p);
  p.threads = 4;
  const auto c = run_experiment(p);
  EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
  EXPECT_EQ(a.cells, c.cells);
  EXPECT_EQ(a.summary, c.summary);
  EXPECT_EQ(a.errors, c.errors);
}

TEST(Experiment, AggregatesMatchAnIndependentPass) {
  const auto r = run_experiment(small_plan(4));
  for (const auto& s : r.summary) {
    std::vector<double> v;
    for (const auto& c : r.cells)
      if (c.entry == s.entry && c.measure == s.measure) v.push_back(c.value);
    ASSERT_EQ(v.size(), s.stats.n);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
    EXPECT_NEAR(s.stats.mean, mean, 1e-12 * std::max(1.0, std::abs(mean)));
    EXPECT_NEAR(s.stats.std, sd, 1e-12 * std::max(1.0, sd));
    ASSERT_TRUE(s.relative.has_value());
    EXPECT_GE(*s.relative, 0.0);
    EXPECT_LE(*s.relative, 1.0);
    ASSERT_TRUE(s.average_rank.has_value());
  }
  for (auto m : all_measures) {
    std::vector<double> rel;
    for (const auto& s : r.summary)
      if (s.measure == m) rel.push_back(*s.relative);
    EXPECT_EQ(*std::max_element(rel.begin(), rel.end()), 1.0);
    if (std::find(r.all_equal_measures.begin(), r.all_equal_measures.end(), measure_name(m)) ==
        r.all_equal_measures.end())
      EXPECT_EQ(*std::min_element(rel.begin(), rel.end()), 0.0);
  }
}

TEST(Experiment, EntriesFollowThePairings) {
  const auto r = run_experiment(small_plan(1));
  std::set<std::string> names;
  for (const auto& e : r.entries) names.insert(e.name);
  EXPECT_TRUE(names.count("LIMO-inst"));
  EXPECT_TRUE(names.count("LIMO-label-t(x)"));
  EXPECT_TRUE(names.count("LIMO-t"));
  for (const auto& e : r.entries) {
    if (e.name == "LIMO-label-t(x)" || e.name == "LIMO-inst-t" || e.variant == "LIMO") EXPECT_TRUE(e.paired);
    if (e.name == "LIMO-label-t" || e.name == "LIMO-inst-t(x)") EXPECT_FALSE(e.paired);
  }
  EXPECT_NE(r.find("LIMO-label", Measure::ranking_loss), nullptr);
  EXPECT_EQ(r.find("LIMO-label", Measure::hamming_loss), nullptr);
}

TEST(Experiment, FailedCellsAreIsolated) {
  // Every label column is constant, so the instance-wise term has nothing to sample.
  Matrix x(12, 2);
  std::vector<std::uint8_t> bits;
  Rng rng(1);
  for (Index i = 0; i < 12; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    bits.insert(bits.end(), {1, 0, 1});
  }
  Dataset d(FeatureMatrix(x), LabelMatrix(12, 3, bits));
  auto p = small_plan(2);
  p.measures = {Measure::ranking_loss, Measure::coverage};
  const auto r = run_experiment(p, d);
  EXPECT_EQ(r.errors.size(), 4u);  // LIMO-inst and LIMO on both replicates
  for (const auto& e : r.errors) EXPECT_EQ(e.stage, "train");
  ASSERT_NE(r.find("LIMO-label", Measure::ranking_loss), nullptr);
  EXPECT_EQ(r.find("LIMO-label", Measure::ranking_loss)->stats.n, 2u);
  EXPECT_EQ(r.find("LIMO", Measure::ranking_loss)->stats.n, 0u);

  auto only_inst = p;
  only_inst.variants = {{"LIMO-inst", 0.0, 1.0}};
  EXPECT_THROW(run_experiment(only_inst, d), EvaluationError);
}

TEST(Report, JsonRoundTripAndCsvShape) {
  const auto r = run_experiment(small_plan(2));
  const auto back = experiment_report_from_json(nlohmann::ordered_json::parse(to_json(r).dump()));
  EXPECT_EQ(back, r);
  const auto csv = format_report_csv(r);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(static_cast<std::size_t>(lines), 1 + r.summary.size() * csv_statistics.size());
  // 3 variants x 7 ranking measures + 6 methods x 4 classification measures.
  EXPECT_EQ(r.summary.size(), 3u * 7u + 6u * 4u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,measure,statistic,value");
}

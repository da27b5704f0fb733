#pragma once

// Replicated train/evaluate runs, relative rescaling and rank aggregation.
//
// A run trains every variant on every replicate split, thresholds the
// scores with each requested pairing, and evaluates on the test part.
// Ranking measures are reported per variant ("LIMO-label"); classification
// measures per (variant, pairing) method ("LIMO-label-t(x)", "LIMO-label-t").

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "limo/data.hpp"
#include "limo/io.hpp"
#include "limo/measures.hpp"
#include "limo/random.hpp"
#include "limo/split.hpp"
#include "limo/synthetic.hpp"
#include "limo/thresholding.hpp"
#include "limo/trainer.hpp"

namespace limo {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Aggregation utilities

struct RelativeValues {
  std::vector<double> values;
  bool all_equal = false;
};

/// Affine map of `values` onto [0, 1] with the best at 1 and the worst at 0.
/// All-equal input maps to all ones and sets `all_equal`.
inline RelativeValues rescale_relative(std::span<const double> values, bool lower_better) {
  detail::require(values.size() >= 2, "rescale_relative needs at least two values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  RelativeValues out;
  if (*lo == *hi) {
    out.values.assign(values.size(), 1.0);
    out.all_equal = true;
    return out;
  }
  const double range = *hi - *lo;
  for (double v : values) out.values.push_back(lower_better ? (*hi - v) / range : (v - *lo) / range);
  return out;
}

/// Ranks within one row (1 = best); ties share the mean of their positions.
inline std::vector<double> mean_ranks(std::span<const double> values, bool lower_better) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return lower_better ? values[a] < values[b] : values[a] > values[b];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

/// Mean rank per column over the rows of a (dataset x variant) table.
inline std::vector<double> average_ranks(const std::vector<std::vector<double>>& table, bool lower_better) {
  detail::require(!table.empty() && !table.front().empty(), "average_ranks needs at least one row");
  std::vector<double> sum(table.front().size(), 0.0);
  for (const auto& row : table) {
    detail::require(row.size() == sum.size(), "average_ranks rows must have equal length");
    const auto r = mean_ranks(row, lower_better);
    for (std::size_t k = 0; k < r.size(); ++k) sum[k] += r[k];
  }
  for (double& s : sum) s /= static_cast<double>(table.size());
  return sum;
}

struct SampleStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t n = 0;
  friend bool operator==(const SampleStats&, const SampleStats&) = default;
};

inline SampleStats sample_stats(std::span<const double> values) {
  SampleStats s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Plan

enum class Pairing { per_label, per_instance };

inline std::string_view pairing_suffix(Pairing p) { return p == Pairing::per_label ? "-t" : "-t(x)"; }

inline Pairing parse_pairing(std::string_view s) {
  if (s == "t" || s == "per_label") return Pairing::per_label;
  if (s == "t(x)" || s == "per_instance") return Pairing::per_instance;
  throw ArgumentError("unknown threshold pairing '" + std::string(s) + "'");
}

inline std::string pairing_name(Pairing p) { return p == Pairing::per_label ? "t" : "t(x)"; }

struct VariantSpec {
  std::string name;  // LIMO-inst, LIMO-label or LIMO
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<Pairing> pairings{Pairing::per_label, Pairing::per_instance};

  /// The pairing that matches the variant's margin family.
  bool is_paired(Pairing p) const {
    if (name == "LIMO-label") return p == Pairing::per_instance;
    if (name == "LIMO-inst") return p == Pairing::per_label;
    return true;
  }

  void validate() const {
    if (name == "LIMO-inst")
      detail::require(lambda1 == 0.0 && lambda2 > 0.0, "LIMO-inst needs lambda1 = 0 and lambda2 > 0");
    else if (name == "LIMO-label")
      detail::require(lambda2 == 0.0 && lambda1 > 0.0, "LIMO-label needs lambda2 = 0 and lambda1 > 0");
    else if (name == "LIMO")
      detail::require(lambda1 > 0.0 && lambda2 > 0.0, "LIMO needs lambda1 > 0 and lambda2 > 0");
    else
      throw ArgumentError("unknown variant '" + name + "'");
    detail::require(!pairings.empty(), "variant " + name + " has no threshold pairing");
  }
};

struct DatasetSource {
  enum class Kind { synthetic, dense, sparse } kind = Kind::synthetic;
  std::size_t n = 2000;      // synthetic
  std::uint64_t seed = 0;    // synthetic
  std::string path;          // dense / sparse
  std::size_t labels = 0;    // sparse
};

struct ExperimentPlan {
  DatasetSource dataset;
  bool bias_feature = true;
  std::vector<VariantSpec> variants;
  std::size_t replicates = 10;
  SplitSpec split{0.5, 0};
  double eta = 0.01;
  std::size_t iters = 100000;
  std::uint64_t train_seed = 0;
  std::vector<Measure> measures{all_measures.begin(), all_measures.end()};
  std::size_t threads = 1;

  void validate() const {
    detail::require(!variants.empty(), "plan has no variants");
    for (const auto& v : variants) v.validate();
    for (std::size_t a = 0; a < variants.size(); ++a)
      for (std::size_t b = a + 1; b < variants.size(); ++b)
        detail::require(variants[a].name != variants[b].name, "duplicate variant " + variants[a].name);
    detail::require(replicates >= 1, "replicates must be positive");
    detail::require(!measures.empty(), "plan has no measures");
    detail::require(threads >= 1, "threads must be positive");
    TrainConfig{1.0, 1.0, eta, iters, train_seed}.validate();
  }
};

inline json to_json(const ExperimentPlan& p) {
  json j;
  auto& d = j["dataset"];
  switch (p.dataset.kind) {
    case DatasetSource::Kind::synthetic:
      d["kind"] = "synthetic";
      d["n"] = p.dataset.n;
      d["seed"] = p.dataset.seed;
      break;
    case DatasetSource::Kind::dense:
      d["kind"] = "dense";
      d["path"] = p.dataset.path;
      break;
    case DatasetSource::Kind::sparse:
      d["kind"] = "sparse";
      d["path"] = p.dataset.path;
      d["labels"] = p.dataset.labels;
      break;
  }
  j["bias_feature"] = p.bias_feature;
  auto& vs = j["variants"] = json::array();
  for (const auto& v : p.variants) {
    json jv;
    jv["name"] = v.name;
    jv["lambda1"] = v.lambda1;
    jv["lambda2"] = v.lambda2;
    auto& th = jv["thresholds"] = json::array();
    for (auto pr : v.pairings) th.push_back(pairing_name(pr));
    vs.push_back(std::move(jv));
  }
  j["replicates"] = p.replicates;
  j["split"] = {{"train_fraction", p.split.train_fraction}, {"seed", p.split.seed}};
  j["train"] = {{"eta", p.eta}, {"iters", p.iters}, {"seed", p.train_seed}};
  auto& ms = j["measures"] = json::array();
  for (auto m : p.measures) ms.push_back(std::string(measure_name(m)));
  j["threads"] = p.threads;
  return j;
}

/// Parses a plan document. Relative dataset paths resolve against `base_dir`.
inline ExperimentPlan plan_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  try {
    ExperimentPlan p;
    const auto& d = j.at("dataset");
    const auto kind = d.at("kind").get<std::string>();
    auto resolve = [&](const std::string& path) {
      std::filesystem::path fp(path);
      return (fp.is_relative() && !base_dir.empty() ? base_dir / fp : fp).string();
    };
    if (kind == "synthetic") {
      p.dataset.kind = DatasetSource::Kind::synthetic;
      p.dataset.n = d.value("n", std::size_t{2000});
      p.dataset.seed = d.value("seed", std::uint64_t{0});
    } else if (kind == "dense") {
      p.dataset.kind = DatasetSource::Kind::dense;
      p.dataset.path = resolve(d.at("path").get<std::string>());
    } else if (kind == "sparse") {
      p.dataset.kind = DatasetSource::Kind::sparse;
      p.dataset.path = resolve(d.at("path").get<std::string>());
      p.dataset.labels = d.at("labels").get<std::size_t>();
    } else {
      throw ArgumentError("unknown dataset kind '" + kind + "'");
    }
    p.bias_feature = j.value("bias_feature", true);
    for (const auto& jv : j.at("variants")) {
      VariantSpec v;
      v.name = jv.at("name").get<std::string>();
      v.lambda1 = jv.at("lambda1").get<double>();
      v.lambda2 = jv.at("lambda2").get<double>();
      if (jv.contains("thresholds")) {
        v.pairings.clear();
        for (const auto& t : jv.at("thresholds")) v.pairings.push_back(parse_pairing(t.get<std::string>()));
      }
      p.variants.push_back(std::move(v));
    }
    p.replicates = j.value("replicates", std::size_t{10});
    if (j.contains("split")) {
      p.split.train_fraction = j["split"].value("train_fraction", 0.5);
      p.split.seed = j["split"].value("seed", std::uint64_t{0});
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      p.eta = t.value("eta", p.eta);
      p.iters = t.value("iters", p.iters);
      p.train_seed = t.value("seed", p.train_seed);
    }
    if (j.contains("measures")) {
      p.measures.clear();
      for (const auto& m : j["measures"]) {
        const auto name = m.get<std::string>();
        if (name == "all") {
          p.measures.assign(all_measures.begin(), all_measures.end());
          break;
        }
        auto parsed = parse_measure(name);
        detail::require(parsed.has_value(), "unknown measure '" + name + "'");
        p.measures.push_back(*parsed);
      }
    }
    p.threads = j.value("threads", std::size_t{1});
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("invalid plan: ") + e.what());
  }
}

inline Dataset load_plan_dataset(const ExperimentPlan& p) {
  Dataset data;
  switch (p.dataset.kind) {
    case DatasetSource::Kind::synthetic: data = synth_quadrant(p.dataset.n, p.dataset.seed); break;
    case DatasetSource::Kind::dense: data = load_dense(p.dataset.path); break;
    case DatasetSource::Kind::sparse: data = load_sparse(p.dataset.path, p.dataset.labels); break;
  }
  return p.bias_feature ? data.with_bias_feature() : data;
}

// ---------------------------------------------------------------------------
// Report

struct ReportEntry {
  std::string name;     // method label, e.g. "LIMO-inst-t"
  std::string variant;
  std::optional<Pairing> pairing;  // empty for ranking-measure entries
  bool paired = true;
  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct RawCell {
  std::string entry;
  std::size_t replicate = 0;
  Measure measure{};
  double value = 0.0;
  friend bool operator==(const RawCell&, const RawCell&) = default;
};

struct CellError {
  std::string variant;
  std::size_t replicate = 0;
  std::string stage;
  std::string message;
  friend bool operator==(const CellError&, const CellError&) = default;
};

struct SummaryRow {
  std::string entry;
  Measure measure{};
  SampleStats stats;
  std::optional<double> relative;
  std::optional<double> average_rank;
  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct ExperimentReport {
  json plan;
  std::vector<ReportEntry> entries;
  std::vector<RawCell> cells;
  std::vector<SummaryRow> summary;
  std::vector<std::string> all_equal_measures;  // relative values set to 1 by convention
  std::vector<CellError> errors;
  double wall_clock_seconds = 0.0;

  /// Summary row for (entry, measure), or nullptr.
  const SummaryRow* find(std::string_view entry, Measure m) const {
    for (const auto& r : summary)
      if (r.entry == entry && r.measure == m) return &r;
    return nullptr;
  }

  /// Raw values of (entry, measure) ordered by replicate.
  std::vector<double> raw(std::string_view entry, Measure m) const {
    std::vector<double> out;
    for (const auto& c : cells)
      if (c.entry == entry && c.measure == m) out.push_back(c.value);
    return out;
  }

  /// Value of (entry, measure) in one replicate.
  std::optional<double> raw(std::string_view entry, Measure m, std::size_t replicate) const {
    for (const auto& c : cells)
      if (c.entry == entry && c.measure == m && c.replicate == replicate) return c.value;
    return std::nullopt;
  }

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

namespace experiment_detail {

struct TaskResult {
  std::vector<RawCell> cells;
  std::vector<CellError> errors;
};

inline CalibrationTarget target_for(Measure m) {
  if (m == Measure::macro_f1) return CalibrationTarget::macro_f1;
  if (m == Measure::micro_f1) return CalibrationTarget::micro_f1;
  return CalibrationTarget::hamming_loss;
}

inline std::uint64_t training_seed(std::uint64_t base, std::size_t replicate, std::size_t variant) {
  return derive_seed(derive_seed(base, static_cast<std::uint64_t>(Stream::experiment), replicate),
                     static_cast<std::uint64_t>(Stream::experiment), variant);
}

inline TaskResult run_cell(const ExperimentPlan& plan, const Dataset& data, std::size_t replicate,
                           std::size_t variant_index) {
  TaskResult out;
  const auto& variant = plan.variants[variant_index];
  auto fail = [&](std::string stage, const std::exception& e) {
    out.errors.push_back({variant.name, replicate, std::move(stage), e.what()});
  };

  Dataset train_part, test_part;
  LinearModel model;
  try {
    SplitSpec s = plan.split;
    s.seed = plan.split.seed + replicate;
    std::tie(train_part, test_part) = split(data, s);
    TrainConfig cfg{variant.lambda1, variant.lambda2, plan.eta, plan.iters,
                    training_seed(plan.train_seed, replicate, variant_index)};
    model = train(train_part, cfg);
  } catch (const Error& e) {
    fail("train", e);
    return out;
  }
  const auto f_train = predict_scores(model, train_part.features);
  const auto f_test = predict_scores(model, test_part.features);
  const auto& y_test = test_part.labels;

  auto record = [&](const std::string& entry, Measure m, const PredictionMatrix* h) {
    try {
      out.cells.push_back({entry, replicate, m, evaluate(m, f_test, y_test, h).value});
    } catch (const Error& e) {
      fail(std::string(measure_name(m)) + " (" + entry + ")", e);
    }
  };

  for (auto m : plan.measures)
    if (!needs_classifier(m)) record(variant.name, m, nullptr);

  for (auto pairing : variant.pairings) {
    const std::string entry = variant.name + std::string(pairing_suffix(pairing));
    try {
      if (pairing == Pairing::per_instance) {
        const auto h = induce_classifier(f_test, fit_instance_thresholder(f_train, train_part.labels));
        for (auto m : plan.measures)
          if (needs_classifier(m)) record(entry, m, &h);
      } else {
        std::map<CalibrationTarget, PredictionMatrix> by_target;
        for (auto m : plan.measures) {
          if (!needs_classifier(m)) continue;
          const auto target = target_for(m);
          auto it = by_target.find(target);
          if (it == by_target.end())
            it = by_target
                     .emplace(target, induce_classifier(f_test, calibrate_per_label(f_train, train_part.labels, target)))
                     .first;
          record(entry, m, &it->second);
        }
      }
    } catch (const Error& e) {
      fail("threshold " + pairing_name(pairing), e);
    }
  }
  return out;
}

inline std::vector<ReportEntry> entries_for(const ExperimentPlan& plan) {
  const bool ranking = std::any_of(plan.measures.begin(), plan.measures.end(), [](Measure m) { return !needs_classifier(m); });
  const bool classification = std::any_of(plan.measures.begin(), plan.measures.end(), needs_classifier);
  std::vector<ReportEntry> out;
  for (const auto& v : plan.variants) {
    if (ranking) out.push_back({v.name, v.name, std::nullopt, true});
    if (classification)
      for (auto p : v.pairings) out.push_back({v.name + std::string(pairing_suffix(p)), v.name, p, v.is_paired(p)});
  }
  return out;
}

}  // namespace experiment_detail

/// Runs the plan on an already loaded dataset (bias column included if wanted).
inline ExperimentReport run_experiment(const ExperimentPlan& plan, const Dataset& data) {
  using namespace experiment_detail;
  plan.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t tasks = plan.replicates * plan.variants.size();
  std::vector<TaskResult> results(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks;)
      results[k] = run_cell(plan, data, k / plan.variants.size(), k % plan.variants.size());
  };
  const std::size_t workers = std::min(plan.threads, tasks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  ExperimentReport report;
  report.plan = to_json(plan);
  report.entries = entries_for(plan);
  for (auto& r : results) {
    report.cells.insert(report.cells.end(), r.cells.begin(), r.cells.end());
    report.errors.insert(report.errors.end(), r.errors.begin(), r.errors.end());
  }
  if (report.cells.empty()) throw EvaluationError("experiment produced no completed cells");

  for (auto m : plan.measures) {
    std::vector<std::size_t> rows;
    for (const auto& e : report.entries) {
      if (e.pairing.has_value() != needs_classifier(m)) continue;
      rows.push_back(report.summary.size());
      report.summary.push_back({e.name, m, sample_stats(report.raw(e.name, m)), std::nullopt, std::nullopt});
    }

    std::vector<std::size_t> complete;
    for (auto r : rows)
      if (report.summary[r].stats.n > 0) complete.push_back(r);
    if (complete.size() >= 2) {
      std::vector<double> means;
      for (auto r : complete) means.push_back(report.summary[r].stats.mean);
      const auto rel = rescale_relative(means, lower_is_better(m));
      for (std::size_t k = 0; k < complete.size(); ++k) report.summary[complete[k]].relative = rel.values[k];
      if (rel.all_equal) report.all_equal_measures.emplace_back(measure_name(m));
    }

    // Ranks over replicates in which every entry of this measure completed.
    std::vector<std::vector<double>> table;
    for (std::size_t rep = 0; rep < plan.replicates && !rows.empty(); ++rep) {
      std::vector<double> row;
      for (auto r : rows)
        if (auto v = report.raw(report.summary[r].entry, m, rep)) row.push_back(*v);
      if (row.size() == rows.size()) table.push_back(std::move(row));
    }
    if (!table.empty()) {
      const auto ranks = average_ranks(table, lower_is_better(m));
      for (std::size_t k = 0; k < rows.size(); ++k) report.summary[rows[k]].average_rank = ranks[k];
    }
  }

  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline ExperimentReport run_experiment(const ExperimentPlan& plan) {
  return run_experiment(plan, load_plan_dataset(plan));
}

// ---------------------------------------------------------------------------
// Report serialization

inline json to_json(const ExperimentReport& r, bool include_wall_clock = true) {
  json j;
  j["plan"] = r.plan;
  auto& entries = j["entries"] = json::array();
  for (const auto& e : r.entries) {
    json je;
    je["name"] = e.name;
    je["variant"] = e.variant;
    je["thresholds"] = e.pairing ? json(pairing_name(*e.pairing)) : json(nullptr);
    je["paired"] = e.paired;
    entries.push_back(std::move(je));
  }
  auto& summary = j["summary"] = json::array();
  for (const auto& s : r.summary) {
    json js;
    js["entry"] = s.entry;
    js["measure"] = std::string(measure_name(s.measure));
    js["mean"] = s.stats.mean;
    js["std"] = s.stats.std;
    js["n"] = s.stats.n;
    js["relative"] = s.relative ? json(*s.relative) : json(nullptr);
    js["average_rank"] = s.average_rank ? json(*s.average_rank) : json(nullptr);
    summary.push_back(std::move(js));
  }
  j["all_equal_measures"] = r.all_equal_measures;
  auto& raw = j["raw"] = json::array();
  for (const auto& c : r.cells)
    raw.push_back({{"entry", c.entry}, {"replicate", c.replicate}, {"measure", std::string(measure_name(c.measure))},
                   {"value", c.value}});
  auto& errors = j["errors"] = json::array();
  for (const auto& e : r.errors)
    errors.push_back({{"variant", e.variant}, {"replicate", e.replicate}, {"stage", e.stage}, {"message", e.message}});
  if (include_wall_clock) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

inline ExperimentReport experiment_report_from_json(const json& j) {
  auto measure = [](const json& v) {
    auto m = parse_measure(v.get<std::string>());
    if (!m) throw DataError("unknown measure in report");
    return *m;
  };
  auto optional_double = [](const json& v) { return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()); };
  ExperimentReport r;
  r.plan = j.at("plan");
  for (const auto& e : j.at("entries"))
    r.entries.push_back({e.at("name").get<std::string>(), e.at("variant").get<std::string>(),
                         e.at("thresholds").is_null() ? std::nullopt
                                                      : std::optional(parse_pairing(e.at("thresholds").get<std::string>())),
                         e.at("paired").get<bool>()});
  for (const auto& s : j.at("summary"))
    r.summary.push_back({s.at("entry").get<std::string>(), measure(s.at("measure")),
                         {s.at("mean").get<double>(), s.at("std").get<double>(), s.at("n").get<std::size_t>()},
                         optional_double(s.at("relative")), optional_double(s.at("average_rank"))});
  r.all_equal_measures = j.at("all_equal_measures").get<std::vector<std::string>>();
  for (const auto& c : j.at("raw"))
    r.cells.push_back({c.at("entry").get<std::string>(), c.at("replicate").get<std::size_t>(), measure(c.at("measure")),
                       c.at("value").get<double>()});
  for (const auto& e : j.at("errors"))
    r.errors.push_back({e.at("variant").get<std::string>(), e.at("replicate").get<std::size_t>(),
                        e.at("stage").get<std::string>(), e.at("message").get<std::string>()});
  r.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
  return r;
}

inline constexpr std::array<const char*, 5> csv_statistics{"mean", "std", "n", "relative", "average_rank"};

/// One line per (method, measure, statistic); missing statistics are left empty.
inline std::string format_report_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "method,measure,statistic,value\n";
  auto num = [](std::optional<double> v) { return v ? io_detail::format_real(*v) : std::string(); };
  for (const auto& s : r.summary) {
    const std::string prefix = "\"" + s.entry + "\"," + std::string(measure_name(s.measure)) + ",";
    out << prefix << "mean," << num(s.stats.mean) << "\n";
    out << prefix << "std," << num(s.stats.std) << "\n";
    out << prefix << "n," << s.stats.n << "\n";
    out << prefix << "relative," << num(s.relative) << "\n";
    out << prefix << "average_rank," << num(s.average_rank) << "\n";
  }
  return out.str();
}

enum class ReportFormat { json, csv };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw ArgumentError("unknown report format '" + std::string(s) + "'");
}

inline std::string format_report(const ExperimentReport& r, ReportFormat format, bool include_wall_clock = true) {
  return format == ReportFormat::json ? to_json(r, include_wall_clock).dump(2) + "\n" : format_report_csv(r);
}

inline void emit_report(const ExperimentReport& r, ReportFormat format, const std::string& path) {
  io_detail::write_file(path, format_report(r, format));
}

}  // namespace limo

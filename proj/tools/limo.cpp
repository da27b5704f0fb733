// Command-line front end: eval, train, predict, synth, experiment, margins, ranks.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "limo/limo.hpp"

namespace {

using limo::json;

enum ExitCode { ok = 0, argument_error = 2, data_error = 3, numeric_error = 4 };

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") std::cout << content;
  else limo::io_detail::write_file(path, content);
}

std::vector<limo::Measure> parse_measure_list(const std::string& list, bool have_predictions) {
  std::vector<limo::Measure> out;
  if (list == "all") {
    for (auto m : limo::all_measures)
      if (have_predictions || !limo::needs_classifier(m)) out.push_back(m);
    return out;
  }
  std::stringstream ss(list);
  for (std::string name; std::getline(ss, name, ',');) {
    auto m = limo::parse_measure(name);
    if (!m) throw limo::ArgumentError("unknown measure '" + name + "'");
    if (limo::needs_classifier(*m) && !have_predictions)
      throw limo::ArgumentError(name + " needs --preds");
    out.push_back(*m);
  }
  return out;
}

limo::Dataset load_data(const std::string& path, bool sparse, std::size_t labels) {
  if (!sparse) return limo::load_dense(path);
  if (labels == 0) throw limo::ArgumentError("--sparse needs --labels");
  return limo::load_sparse(path, labels);
}

struct EvalArgs {
  std::string scores, labels, preds, measures = "all", out = "-", format = "json";
};

void run_eval(const EvalArgs& a) {
  const auto f = limo::load_scores(a.scores);
  const auto y = limo::load_labels(a.labels);
  limo::require_same_shape(f, y);
  std::optional<limo::PredictionMatrix> h;
  if (!a.preds.empty()) {
    h = limo::load_predictions(a.preds);
    limo::require_same_shape(*h, y);
  }
  const auto format = limo::parse_report_format(a.format);
  const auto measures = parse_measure_list(a.measures, h.has_value());

  json values;
  json skipped;
  for (auto m : measures) {
    const auto v = limo::evaluate(m, f, y, h ? &*h : nullptr);
    values[std::string(limo::measure_name(m))] = v.value;
    skipped[std::string(limo::measure_name(m))] = v.skipped;
  }
  if (format == limo::ReportFormat::json) {
    json j = values;
    j["skipped"] = skipped;
    write_output(a.out, j.dump(2) + "\n");
  } else {
    std::string csv = "measure,value,skipped\n";
    for (auto m : measures) {
      const std::string name(limo::measure_name(m));
      csv += name + "," + limo::io_detail::format_real(values[name].get<double>()) + "," +
             std::to_string(skipped[name].get<std::size_t>()) + "\n";
    }
    write_output(a.out, csv);
  }
}

struct TrainArgs {
  std::string data, model_out, calibrate = "hamming_loss";
  bool sparse = false, bias = false;
  std::size_t labels = 0;
  limo::TrainConfig config;
};

void run_train(const TrainArgs& a) {
  const auto target = limo::parse_calibration_target(a.calibrate);
  const auto raw = load_data(a.data, a.sparse, a.labels);
  const auto data = a.bias ? raw.with_bias_feature() : raw;
  limo::ModelFile file{limo::train(data, a.config), a.bias, std::nullopt, std::nullopt};
  const auto f = limo::predict_scores(file.model, data.features);
  file.per_label = limo::calibrate_per_label(f, data.labels, target);
  file.per_instance = limo::fit_instance_thresholder(f, data.labels);
  limo::save_model(a.model_out, file);
}

struct PredictArgs {
  std::string model, data, scores_out, preds_out, thresholds = "t(x)";
  bool sparse = false;
  std::size_t labels = 0;
};

void run_predict(const PredictArgs& a) {
  const auto file = limo::load_model(a.model);
  const auto data = load_data(a.data, a.sparse, a.sparse ? (a.labels ? a.labels : file.model.labels()) : 0);
  const auto f = file.scores(data.features);
  if (!a.scores_out.empty()) write_output(a.scores_out, limo::format_scores(f));
  if (!a.preds_out.empty()) {
    const auto pairing = limo::parse_pairing(a.thresholds);
    limo::PredictionMatrix h;
    if (pairing == limo::Pairing::per_label) {
      if (!file.per_label) throw limo::DataError("model has no per-label thresholds");
      h = limo::induce_classifier(f, *file.per_label);
    } else {
      if (!file.per_instance) throw limo::DataError("model has no per-instance thresholder");
      h = limo::induce_classifier(f, *file.per_instance);
    }
    write_output(a.preds_out, limo::io_detail::format_bits(h));
  }
}

struct ExperimentArgs {
  std::string plan, out = "-", format = "json";
  std::size_t threads = 0;
};

void run_experiment_command(const ExperimentArgs& a) {
  const auto format = limo::parse_report_format(a.format);
  json j;
  try {
    j = json::parse(limo::io_detail::read_file(a.plan));
  } catch (const json::exception& e) {
    throw limo::DataError(a.plan + ": " + e.what());
  }
  auto plan = limo::plan_from_json(j, std::filesystem::path(a.plan).parent_path());
  if (a.threads) plan.threads = a.threads;
  const auto report = limo::run_experiment(plan);
  write_output(a.out, limo::format_report(report, format));
  for (const auto& e : report.errors)
    std::cerr << "warning: " << e.variant << " replicate " << e.replicate << " " << e.stage << ": " << e.message
              << "\n";
}

struct MarginsArgs {
  std::string scores, labels, out = "-";
};

void run_margins(const MarginsArgs& a) {
  const auto f = limo::load_scores(a.scores);
  const auto y = limo::load_labels(a.labels);
  limo::require_same_shape(f, y);
  write_output(a.out, limo::to_json(limo::margin_profile(f, y)).dump(2) + "\n");
}

struct RanksArgs {
  std::string table, out = "-";
  bool lower_better = false;
};

/// Table: a header line of method names, then one whitespace-separated row per dataset.
void run_ranks(const RanksArgs& a) {
  const auto text = limo::io_detail::read_file(a.table);
  const auto lines = limo::io_detail::split_lines(text);
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto tok = limo::io_detail::tokens(lines[k]);
    if (tok.empty()) continue;
    if (names.empty()) {
      names.assign(tok.begin(), tok.end());
      continue;
    }
    if (tok.size() != names.size()) throw limo::DataError(k + 1, "row length does not match the header");
    std::vector<double> row;
    for (auto t : tok) row.push_back(limo::io_detail::finite_real(t, k + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw limo::DataError("rank table has no data rows");
  const auto ranks = limo::average_ranks(rows, a.lower_better);
  json j;
  for (std::size_t k = 0; k < names.size(); ++k) j[names[k]] = ranks[k];
  write_output(a.out, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label margin toolkit"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a score matrix (and optional predictions)");
  eval_cmd->add_option("--scores", eval.scores, "Score matrix file")->required();
  eval_cmd->add_option("--labels", eval.labels, "Label matrix file")->required();
  eval_cmd->add_option("--preds", eval.preds, "Prediction matrix file");
  eval_cmd->add_option("--measures", eval.measures, "'all' or a comma-separated list");
  eval_cmd->add_option("--out", eval.out, "Output path ('-' for stdout)");
  eval_cmd->add_option("--format", eval.format, "json or csv");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a linear model and fit its thresholds");
  train_cmd->add_option("--data", tr.data, "Dataset file")->required();
  train_cmd->add_flag("--sparse", tr.sparse, "Read the sparse format");
  train_cmd->add_option("--labels", tr.labels, "Label count for the sparse format");
  train_cmd->add_option("--lambda1", tr.config.lambda1, "Label-wise margin weight")->required();
  train_cmd->add_option("--lambda2", tr.config.lambda2, "Instance-wise margin weight")->required();
  train_cmd->add_option("--eta", tr.config.eta, "Step size")->default_val(0.01);
  train_cmd->add_option("--iters", tr.config.iters, "SGD iterations")->default_val(100000);
  train_cmd->add_option("--seed", tr.config.seed, "Random seed")->default_val(0);
  train_cmd->add_flag("--bias", tr.bias, "Append a constant feature");
  train_cmd->add_option("--calibrate", tr.calibrate, "Per-label threshold target: hamming_loss, macro_f1, micro_f1");
  train_cmd->add_option("--model-out", tr.model_out, "Model file to write")->required();

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Score a dataset with a saved model");
  predict_cmd->add_option("--model", pr.model, "Model file")->required();
  predict_cmd->add_option("--data", pr.data, "Dataset file")->required();
  predict_cmd->add_flag("--sparse", pr.sparse, "Read the sparse format");
  predict_cmd->add_option("--labels", pr.labels, "Label count for the sparse format");
  predict_cmd->add_option("--scores-out", pr.scores_out, "Score matrix output");
  predict_cmd->add_option("--preds-out", pr.preds_out, "Prediction matrix output");
  predict_cmd->add_option("--thresholds", pr.thresholds, "t (per label) or t(x) (per instance)");

  std::size_t synth_n = 2000;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the quadrant dataset");
  synth_cmd->add_option("--n", synth_n, "Number of points")->default_val(2000);
  synth_cmd->add_option("--seed", synth_seed, "Random seed")->default_val(0);
  synth_cmd->add_option("--out", synth_out, "Output path ('-' for stdout)")->required();

  ExperimentArgs ex;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a replicated experiment plan");
  exp_cmd->add_option("--plan", ex.plan, "Plan JSON file")->required();
  exp_cmd->add_option("--out", ex.out, "Report path ('-' for stdout)");
  exp_cmd->add_option("--format", ex.format, "json or csv");
  exp_cmd->add_option("--threads", ex.threads, "Worker threads (overrides the plan)");

  MarginsArgs mg;
  auto* margins_cmd = app.add_subcommand("margins", "Margins and effectiveness of a score matrix");
  margins_cmd->add_option("--scores", mg.scores, "Score matrix file")->required();
  margins_cmd->add_option("--labels", mg.labels, "Label matrix file")->required();
  margins_cmd->add_option("--out", mg.out, "Output path ('-' for stdout)");

  RanksArgs rk;
  auto* ranks_cmd = app.add_subcommand("ranks", "Average ranks from a dataset x method table");
  ranks_cmd->add_option("--table", rk.table, "Table file")->required();
  ranks_cmd->add_flag("--lower-better", rk.lower_better, "Smaller values rank first");
  ranks_cmd->add_option("--out", rk.out, "Output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return argument_error;
  }

  try {
    if (*eval_cmd) run_eval(eval);
    else if (*train_cmd) run_train(tr);
    else if (*predict_cmd) run_predict(pr);
    else if (*synth_cmd) write_output(synth_out, limo::format_dense(limo::synth_quadrant(synth_n, synth_seed)));
    else if (*exp_cmd) run_experiment_command(ex);
    else if (*margins_cmd) run_margins(mg);
    else if (*ranks_cmd) run_ranks(rk);
  } catch (const limo::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return argument_error;
  } catch (const limo::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return numeric_error;
  } catch (const limo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return data_error;
  }
  return ok;
}

#pragma once

// On-disk model: trained weights plus the thresholds fitted on its training
// scores, in one JSON document.

#include <optional>
#include <string>

#include "json.hpp"
#include "limo/io.hpp"
#include "limo/thresholding.hpp"
#include "limo/trainer.hpp"

namespace limo {

struct ModelFile {
  LinearModel model;
  bool bias_feature = false;  // a constant 1 is appended to every instance before scoring
  std::optional<PerLabelThresholds> per_label;
  std::optional<InstanceThresholder> per_instance;

  /// Scores for raw (un-augmented) features.
  ScoreMatrix scores(const FeatureMatrix& x) const {
    if (!bias_feature) return predict_scores(model, x);
    Matrix aug(x.rows(), x.cols() + 1);
    aug.leftCols(x.cols()) = x.values();
    aug.col(x.cols()).setOnes();
    return predict_scores(model, FeatureMatrix(std::move(aug)));
  }

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

inline nlohmann::ordered_json to_json(const ModelFile& f) {
  auto j = to_json(f.model);
  j["bias_feature"] = f.bias_feature;
  auto& t = j["thresholds"] = nlohmann::ordered_json::array();
  if (f.per_label) t.push_back(to_json(*f.per_label));
  if (f.per_instance) t.push_back(to_json(*f.per_instance));
  return j;
}

inline ModelFile model_file_from_json(const nlohmann::ordered_json& j) {
  try {
    ModelFile f{linear_model_from_json(j), j.value("bias_feature", false), std::nullopt, std::nullopt};
    if (j.contains("thresholds"))
      for (const auto& t : j["thresholds"]) {
        if (t.value("mode", "") == "per_label") f.per_label = per_label_thresholds_from_json(t);
        else f.per_instance = instance_thresholder_from_json(t);
      }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const std::string& path, const ModelFile& f) {
  io_detail::write_file(path, to_json(f).dump(2) + "\n");
}

inline ModelFile load_model(const std::string& path) {
  const auto text = io_detail::read_file(path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return model_file_from_json(j);
}

}  // namespace limo

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "lbrg/classifier.hpp"
#include "lbrg/error.hpp"

namespace lbrg {

namespace {

using nlohmann::json;

json meta_to_json(const TrainingMeta& meta) {
  return json{{"iterations_run", meta.iterations_run},
              {"final_loss", meta.final_loss},
              {"l2_strength", meta.l2_strength},
              {"degenerate", meta.degenerate},
              {"threshold_warning", meta.threshold_warning}};
}

TrainingMeta meta_from_json(const json& j) {
  TrainingMeta meta;
  meta.iterations_run = j.at("iterations_run").get<int>();
  meta.final_loss = j.at("final_loss").get<double>();
  meta.l2_strength = j.at("l2_strength").get<double>();
  meta.degenerate = j.at("degenerate").get<bool>();
  meta.threshold_warning = j.at("threshold_warning").get<bool>();
  return meta;
}

}  // namespace

void save_ensemble(const std::filesystem::path& path,
                   const ClassifierEnsemble& ensemble) {
  json doc;
  doc["format_version"] = kEnsembleFormatVersion;
  doc["labels"] = json::array();
  for (auto name : kLabelNames) doc["labels"].push_back(name);
  doc["feature_dim"] = ensemble.feature_dim();
  doc["standardizer"] = {{"mean", ensemble.standardizer.mean},
                         {"stddev", ensemble.standardizer.stddev}};
  doc["classifiers"] = json::array();
  for (const auto& clf : ensemble.classifiers) {
    doc["classifiers"].push_back({{"label_index", clf.label_index},
                                  {"weights", clf.weights},
                                  {"bias", clf.bias},
                                  {"threshold", clf.threshold},
                                  {"meta", meta_to_json(clf.training_meta)}});
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io, "cannot write ensemble file: " + path.string());
  }
  out << doc.dump(2) << "\n";
}

ClassifierEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::missing_file,
                "cannot open ensemble file: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema, path.string() + ": " + e.what());
  }

  try {
    const auto version = doc.at("format_version").get<uint32_t>();
    if (version != kEnsembleFormatVersion) {
      throw Error(ErrorKind::schema,
                  "unsupported ensemble format version " +
                      std::to_string(version));
    }
    const auto labels = doc.at("labels").get<std::vector<std::string>>();
    if (labels.size() != kNumLabels) {
      throw Error(ErrorKind::schema, "ensemble must carry 14 labels");
    }
    for (std::size_t i = 0; i < kNumLabels; ++i) {
      if (labels[i] != kLabelNames[i]) {
        throw Error(ErrorKind::schema,
                    "ensemble label order mismatch at index " +
                        std::to_string(i) + ": '" + labels[i] + "'");
      }
    }

    ClassifierEnsemble ensemble;
    ensemble.standardizer.mean =
        doc.at("standardizer").at("mean").get<std::vector<double>>();
    ensemble.standardizer.stddev =
        doc.at("standardizer").at("stddev").get<std::vector<double>>();
    const auto dim = doc.at("feature_dim").get<std::size_t>();
    if (ensemble.standardizer.mean.size() != dim ||
        ensemble.standardizer.stddev.size() != dim) {
      throw Error(ErrorKind::schema, "standardizer dimension mismatch");
    }

    for (const auto& j : doc.at("classifiers")) {
      LabelClassifier clf;
      clf.label_index = j.at("label_index").get<int>();
      clf.weights = j.at("weights").get<std::vector<double>>();
      clf.bias = j.at("bias").get<double>();
      clf.threshold = j.at("threshold").get<double>();
      clf.training_meta = meta_from_json(j.at("meta"));
      if (clf.weights.size() != dim) {
        throw Error(ErrorKind::schema,
                    "classifier weight dimension mismatch for label " +
                        std::to_string(clf.label_index));
      }
      if (!(clf.threshold > 0.0 && clf.threshold < 1.0)) {
        throw Error(ErrorKind::schema, "threshold outside (0, 1)");
      }
      for (double w : clf.weights) {
        if (!std::isfinite(w)) {
          throw Error(ErrorKind::schema, "non-finite classifier weight");
        }
      }
      ensemble.classifiers.push_back(std::move(clf));
    }
    if (ensemble.classifiers.size() != kNumLabels) {
      throw Error(ErrorKind::schema, "ensemble must carry 14 classifiers");
    }
    for (std::size_t i = 0; i < kNumLabels; ++i) {
      if (ensemble.classifiers[i].label_index != static_cast<int>(i)) {
        throw Error(ErrorKind::schema, "classifiers out of canonical order");
      }
    }
    return ensemble;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema, path.string() + ": " + e.what());
  }
}

}  // namespace lbrg

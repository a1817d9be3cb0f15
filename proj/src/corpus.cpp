#include "lbrg/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "lbrg/embedding_io.hpp"
#include "lbrg/error.hpp"

namespace lbrg {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Parses one JSON object per non-empty line, reporting the line number on
// failure so bad records are findable in large files.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::missing_file, "cannot open " + path.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::schema, path.string() + ":" +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    }
    if (!record.is_object()) {
      throw Error(ErrorKind::schema, path.string() + ":" +
                                         std::to_string(line_no) +
                                         ": record is not an object");
    }
    fn(record, line_no);
  }
}

std::string require_string(const json& record, const char* key,
                           const std::filesystem::path& path,
                           std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string() ||
      it->get<std::string>().empty()) {
    throw Error(ErrorKind::schema,
                path.string() + ":" + std::to_string(line_no) +
                    ": missing or empty field '" + key + "'");
  }
  return it->get<std::string>();
}

LabelState parse_label_value(const json& value,
                             const std::filesystem::path& path,
                             std::size_t line_no) {
  if (value.is_null()) return LabelState::unmentioned;
  if (value.is_number_integer()) {
    switch (value.get<int>()) {
      case 1: return LabelState::positive;
      case 0: return LabelState::negative;
      case -1: return LabelState::uncertain;
      default: break;
    }
  }
  throw Error(ErrorKind::schema,
              path.string() + ":" + std::to_string(line_no) +
                  ": label values must be 1, 0, -1, or absent");
}

}  // namespace

const char* to_string(SectionKind section) {
  return section == SectionKind::findings ? "findings" : "impression";
}

SectionKind parse_section(const std::string& name) {
  if (name == "findings") return SectionKind::findings;
  if (name == "impression") return SectionKind::impression;
  throw Error(ErrorKind::schema, "unknown section '" + name + "'");
}

const char* to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validate: return "validate";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "validate") return Split::validate;
  if (name == "test") return Split::test;
  throw Error(ErrorKind::schema, "unknown split '" + name + "'");
}

const std::vector<std::string>& default_view_preference() {
  static const std::vector<std::string> order = {
      "PA", "AP", "LATERAL", "LL", "AP AXIAL", "LAO", "LPO", "Unknown"};
  return order;
}

std::string select_study_image(
    const Study& study, const std::vector<std::string>& view_preference) {
  if (study.views.empty()) {
    throw Error(ErrorKind::no_views,
                "study '" + study.study_id + "' has no views");
  }
  const std::size_t unlisted = view_preference.size();
  std::size_t best_pref = unlisted + 1;
  const StudyView* best = nullptr;
  for (const auto& view : study.views) {
    std::size_t pref = unlisted;
    const std::string code = lower(view.view_code);
    for (std::size_t i = 0; i < view_preference.size(); ++i) {
      if (lower(view_preference[i]) == code) {
        pref = i;
        break;
      }
    }
    if (pref < best_pref) {  // strict: ties keep the earlier view
      best_pref = pref;
      best = &view;
    }
  }
  return best->image_id;
}

const Study* Corpus::find_study(const std::string& study_id) const {
  auto it = study_index_.find(study_id);
  return it == study_index_.end() ? nullptr : &studies_[it->second];
}

const LabelVector* Corpus::labels(const std::string& study_id) const {
  auto it = labels_.find(study_id);
  return it == labels_.end() ? nullptr : &it->second;
}

const EmbeddingRecord* Corpus::embedding(const std::string& study_id) const {
  auto it = embeddings_.find(study_id);
  return it == embeddings_.end() ? nullptr : &it->second;
}

std::vector<std::string> Corpus::study_ids(Split split, SectionKind section,
                                           bool require_embedding) const {
  std::vector<std::string> ids;
  for (const auto& study : studies_) {
    if (study.split != split || !study.has_section(section)) continue;
    if (require_embedding && !embeddings_.contains(study.study_id)) continue;
    ids.push_back(study.study_id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Corpus ingest_corpus(const std::filesystem::path& reports_path,
                     const std::filesystem::path& labels_path,
                     const std::filesystem::path& embeddings_path,
                     const std::filesystem::path& splits_path,
                     const IngestOptions& options) {
  Corpus corpus;

  // Optional split override file: {study_id, split} records.
  std::unordered_map<std::string, Split> split_override;
  if (!splits_path.empty()) {
    for_each_record(splits_path, [&](const json& record, std::size_t line_no) {
      const auto id = require_string(record, "study_id", splits_path, line_no);
      const auto split =
          parse_split(require_string(record, "split", splits_path, line_no));
      if (!split_override.emplace(id, split).second) {
        throw Error(ErrorKind::schema,
                    splits_path.string() + ":" + std::to_string(line_no) +
                        ": duplicate split record for '" + id + "'");
      }
    });
  }

  for_each_record(reports_path, [&](const json& record, std::size_t line_no) {
    Study study;
    study.study_id = require_string(record, "study_id", reports_path, line_no);
    study.patient_id =
        require_string(record, "patient_id", reports_path, line_no);

    if (auto it = split_override.find(study.study_id);
        it != split_override.end()) {
      study.split = it->second;
    } else {
      study.split =
          parse_split(require_string(record, "split", reports_path, line_no));
    }

    for (SectionKind kind : {SectionKind::findings, SectionKind::impression}) {
      auto it = record.find(to_string(kind));
      if (it == record.end() || it->is_null()) continue;
      if (!it->is_string()) {
        throw Error(ErrorKind::schema,
                    reports_path.string() + ":" + std::to_string(line_no) +
                        ": section must be a string");
      }
      auto text = it->get<std::string>();
      if (!text.empty()) study.sections[kind] = std::move(text);
    }

    if (auto it = record.find("views"); it != record.end()) {
      if (!it->is_array()) {
        throw Error(ErrorKind::schema,
                    reports_path.string() + ":" + std::to_string(line_no) +
                        ": 'views' must be an array");
      }
      for (const auto& v : *it) {
        StudyView view;
        view.view_code = require_string(v, "view", reports_path, line_no);
        view.image_id = require_string(v, "image_id", reports_path, line_no);
        study.views.push_back(std::move(view));
      }
    }
    if (!study.views.empty()) {
      study.selected_image =
          select_study_image(study, options.view_preference);
    }

    if (corpus.study_index_.contains(study.study_id)) {
      throw Error(ErrorKind::schema,
                  reports_path.string() + ":" + std::to_string(line_no) +
                      ": duplicate study_id '" + study.study_id + "'");
    }
    corpus.study_index_.emplace(study.study_id, corpus.studies_.size());
    corpus.studies_.push_back(std::move(study));
  });

  // Patient-level split soundness.
  std::unordered_map<std::string, Split> patient_split;
  for (const auto& study : corpus.studies_) {
    auto [it, inserted] =
        patient_split.emplace(study.patient_id, study.split);
    if (!inserted && it->second != study.split) {
      throw Error(ErrorKind::split_violation,
                  "patient '" + study.patient_id +
                      "' has studies in splits '" + to_string(it->second) +
                      "' and '" + to_string(study.split) + "'");
    }
  }

  for_each_record(labels_path, [&](const json& record, std::size_t line_no) {
    const auto id = require_string(record, "study_id", labels_path, line_no);
    if (!corpus.study_index_.contains(id)) {
      throw Error(ErrorKind::dangling_reference,
                  labels_path.string() + ":" + std::to_string(line_no) +
                      ": label row for unknown study '" + id + "'");
    }
    LabelVector labels;
    for (const auto& [key, value] : record.items()) {
      if (key == "study_id") continue;
      auto index = label_index(key);
      if (!index) {
        throw Error(ErrorKind::schema,
                    labels_path.string() + ":" + std::to_string(line_no) +
                        ": unknown label '" + key + "'");
      }
      labels[*index] = parse_label_value(value, labels_path, line_no);
    }
    if (!corpus.labels_.emplace(id, labels).second) {
      throw Error(ErrorKind::schema,
                  labels_path.string() + ":" + std::to_string(line_no) +
                      ": duplicate label row for '" + id + "'");
    }
  });

  const EmbeddingFile embeddings = read_embedding_file(embeddings_path);
  corpus.retrieval_dim_ = embeddings.retrieval_dim;
  corpus.classifier_dim_ = embeddings.classifier_dim;
  for (const auto& rec : embeddings.records) {
    if (!corpus.study_index_.contains(rec.study_id)) {
      throw Error(ErrorKind::dangling_reference,
                  "embedding for unknown study '" + rec.study_id + "'");
    }
    if (!corpus.embeddings_.emplace(rec.study_id, rec).second) {
      throw Error(ErrorKind::schema,
                  "duplicate embedding for study '" + rec.study_id + "'");
    }
  }

  for (const auto& study : corpus.studies_) {
    if (!corpus.embeddings_.contains(study.study_id)) {
      corpus.warnings_.push_back("study '" + study.study_id +
                                 "' has no embedding and will be excluded "
                                 "from retrieval and inference");
    }
  }
  return corpus;
}

CorpusManifest build_manifest(const Corpus& corpus, SectionKind section) {
  CorpusManifest manifest;
  manifest.section = section;

  auto train = corpus.study_ids(Split::train, section, true);
  auto validate = corpus.study_ids(Split::validate, section, true);
  manifest.retrieval_ids.reserve(train.size() + validate.size());
  std::merge(train.begin(), train.end(), validate.begin(), validate.end(),
             std::back_inserter(manifest.retrieval_ids));
  manifest.inference_ids = corpus.study_ids(Split::test, section, true);

  if (manifest.retrieval_ids.empty()) {
    throw Error(ErrorKind::empty_retrieval_set,
                std::string("no train/validate study has a non-empty '") +
                    to_string(section) + "' section");
  }
  return manifest;
}

}  // namespace lbrg

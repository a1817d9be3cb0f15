#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lbrg/labels.hpp"

namespace lbrg {

enum class SectionKind { findings, impression };

const char* to_string(SectionKind section);
SectionKind parse_section(const std::string& name);

enum class Split { train, validate, test };

const char* to_string(Split split);
Split parse_split(const std::string& name);

struct StudyView {
  std::string view_code;
  std::string image_id;
};

// One imaging study: the unit reports are written at.
struct Study {
  std::string study_id;
  std::string patient_id;
  Split split = Split::train;
  std::map<SectionKind, std::string> sections;  // present iff non-empty text
  std::vector<StudyView> views;
  std::optional<std::string> selected_image;

  bool has_section(SectionKind kind) const { return sections.contains(kind); }
};

// Retrieval-space and classifier-space feature vectors for a study's
// selected image. The two spaces come from different layers of the image
// encoder and generally have different dimensions.
struct EmbeddingRecord {
  std::string study_id;
  std::vector<float> retrieval_vec;
  std::vector<float> classifier_vec;
};

// The split of studies into the example corpus (train + validate) and the
// studies to caption (test), restricted to studies that actually carry the
// target section and an embedding.
struct CorpusManifest {
  SectionKind section = SectionKind::findings;
  std::vector<std::string> retrieval_ids;  // sorted by study_id
  std::vector<std::string> inference_ids;  // sorted by study_id
};

// Preference order for picking the single image representing a study.
// Frontal views first, then laterals, then everything else; codes are
// compared case-insensitively. Codes absent from the list rank last.
const std::vector<std::string>& default_view_preference();

// Returns the image whose view code has the lowest index in view_preference;
// ties (and unlisted codes) resolve to the earliest view in the study.
// Throws NoViews when the study has no views.
std::string select_study_image(const Study& study,
                               const std::vector<std::string>& view_preference);

struct IngestOptions {
  std::vector<std::string> view_preference = default_view_preference();
};

class Corpus {
 public:
  const std::vector<Study>& studies() const { return studies_; }

  const Study* find_study(const std::string& study_id) const;
  // Extracted 4-valued labels; a study with no labels-file row is
  // all-unmentioned. Null for unknown ids.
  const LabelVector* labels(const std::string& study_id) const;
  const EmbeddingRecord* embedding(const std::string& study_id) const;

  uint32_t retrieval_dim() const { return retrieval_dim_; }
  uint32_t classifier_dim() const { return classifier_dim_; }

  // Non-fatal issues found during ingest (e.g. studies without embeddings).
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::vector<std::string> study_ids(Split split, SectionKind section,
                                     bool require_embedding) const;

 private:
  friend Corpus ingest_corpus(const std::filesystem::path&,
                              const std::filesystem::path&,
                              const std::filesystem::path&,
                              const std::filesystem::path&,
                              const IngestOptions&);

  std::vector<Study> studies_;
  std::unordered_map<std::string, std::size_t> study_index_;
  std::unordered_map<std::string, LabelVector> labels_;
  std::unordered_map<std::string, EmbeddingRecord> embeddings_;
  uint32_t retrieval_dim_ = 0;
  uint32_t classifier_dim_ = 0;
  std::vector<std::string> warnings_;
};

// Joins reports, labels, and embeddings on study_id. All record files are
// line-delimited JSON, one record per study; the embedding file uses the
// binary format in embedding_io.hpp. splits_path may be empty, in which case
// every report record must carry its own "split" field; when given, the
// splits file overrides per-report splits.
Corpus ingest_corpus(const std::filesystem::path& reports_path,
                     const std::filesystem::path& labels_path,
                     const std::filesystem::path& embeddings_path,
                     const std::filesystem::path& splits_path,
                     const IngestOptions& options = {});

// Throws EmptyRetrievalSet when no train/validate study has the section.
CorpusManifest build_manifest(const Corpus& corpus, SectionKind section);

}  // namespace lbrg

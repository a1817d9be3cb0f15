#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lbrg/corpus.hpp"

namespace lbrg {

// Exhaustive-scan store over retrieval-space embeddings. Exact search keeps
// the ranking semantics reproducible; retrieval sets here are small enough
// (~10^5 rows) that an ANN index buys nothing.
class EmbeddingStore {
 public:
  // Rows follow the order of `ids`; rejects zero vectors.
  static EmbeddingStore build(const std::vector<std::string>& ids,
                              const Corpus& corpus);
  static EmbeddingStore build(std::vector<std::string> ids,
                              std::vector<std::vector<float>> vectors);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> row(std::size_t i) const;
  float norm(std::size_t i) const { return norms_[i]; }

 private:
  std::vector<std::string> ids_;
  std::vector<float> matrix_;  // row-major, size() x dim()
  std::vector<float> norms_;
  std::size_t dim_ = 0;
};

struct RankedEntry {
  std::string study_id;
  double similarity = 0.0;
  // Position in the similarity-sorted list before any filter reorders it.
  std::size_t original_rank = 0;
};

struct RankedList {
  std::vector<RankedEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

inline constexpr int kDefaultTopK = 5;

// (a.b) / (|a||b|), clamped to [-1, 1] against round-off.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

// Ranks every store entry by cosine similarity to the query, descending.
// Equal similarities order by ascending study_id so runs are reproducible.
RankedList rank_all(const EmbeddingStore& store, std::span<const float> query);

// First min(k, |ranked|) entries; k must be >= 1.
RankedList take_top_k(const RankedList& ranked, int k);

}  // namespace lbrg

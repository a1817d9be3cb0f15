#include "lbrg/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "lbrg/error.hpp"

namespace lbrg {

namespace {

double l2_norm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * x;
  return std::sqrt(sum);
}

}  // namespace

EmbeddingStore EmbeddingStore::build(const std::vector<std::string>& ids,
                                     const Corpus& corpus) {
  std::vector<std::vector<float>> vectors;
  vectors.reserve(ids.size());
  for (const auto& id : ids) {
    const EmbeddingRecord* rec = corpus.embedding(id);
    if (rec == nullptr) {
      throw Error(ErrorKind::missing_embedding,
                  "no embedding for study '" + id + "'");
    }
    vectors.push_back(rec->retrieval_vec);
  }
  return build(ids, std::move(vectors));
}

EmbeddingStore EmbeddingStore::build(std::vector<std::string> ids,
                                     std::vector<std::vector<float>> vectors) {
  if (ids.size() != vectors.size()) {
    throw Error(ErrorKind::invalid_argument,
                "ids and vectors must have equal length");
  }
  EmbeddingStore store;
  store.dim_ = vectors.empty() ? 0 : vectors.front().size();
  store.matrix_.reserve(ids.size() * store.dim_);
  store.norms_.reserve(ids.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != store.dim_) {
      throw Error(ErrorKind::dimension_mismatch,
                  "embedding row '" + ids[i] + "' has dimension " +
                      std::to_string(vectors[i].size()) + ", expected " +
                      std::to_string(store.dim_));
    }
    const double norm = l2_norm(vectors[i]);
    if (norm == 0.0) {
      throw Error(ErrorKind::zero_vector,
                  "zero embedding vector for '" + ids[i] + "'");
    }
    store.norms_.push_back(static_cast<float>(norm));
    store.matrix_.insert(store.matrix_.end(), vectors[i].begin(),
                         vectors[i].end());
  }
  store.ids_ = std::move(ids);
  return store;
}

std::span<const float> EmbeddingStore::row(std::size_t i) const {
  return {matrix_.data() + i * dim_, dim_};
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                "cosine_similarity: dimensions " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorKind::zero_vector,
                "cosine_similarity over a zero vector is undefined");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
  }
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

RankedList rank_all(const EmbeddingStore& store,
                    std::span<const float> query) {
  if (store.size() == 0) {
    throw Error(ErrorKind::empty_store, "rank_all over an empty store");
  }
  if (query.size() != store.dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "query dimension " + std::to_string(query.size()) +
                    " does not match store dimension " +
                    std::to_string(store.dim()));
  }
  const double qnorm = l2_norm(query);
  if (qnorm == 0.0) {
    throw Error(ErrorKind::zero_vector, "zero query vector");
  }

  RankedList ranked;
  ranked.entries.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto row = store.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      dot += static_cast<double>(query[j]) * row[j];
    }
    const double sim = std::clamp(dot / (qnorm * store.norm(i)), -1.0, 1.0);
    ranked.entries.push_back({store.ids()[i], sim, 0});
  }
  std::sort(ranked.entries.begin(), ranked.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.similarity != b.similarity) {
                return a.similarity > b.similarity;
              }
              return a.study_id < b.study_id;
            });
  for (std::size_t r = 0; r < ranked.entries.size(); ++r) {
    ranked.entries[r].original_rank = r;
  }
  return ranked;
}

RankedList take_top_k(const RankedList& ranked, int k) {
  if (k < 1) {
    throw Error(ErrorKind::invalid_argument, "take_top_k requires k >= 1");
  }
  RankedList out;
  const std::size_t n =
      std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
  out.entries.assign(ranked.entries.begin(), ranked.entries.begin() + n);
  return out;
}

}  // namespace lbrg

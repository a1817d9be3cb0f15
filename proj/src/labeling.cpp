#include "lbrg/labeling.hpp"

#include <algorithm>

#include "lbrg/error.hpp"

namespace lbrg {

namespace {

const BinaryLabelVector& lookup(const LabelIndex& index,
                                const std::string& study_id) {
  auto it = index.find(study_id);
  if (it == index.end()) {
    throw Error(ErrorKind::unknown_study,
                "no labels for ranked study '" + study_id + "'");
  }
  return it->second;
}

}  // namespace

const char* to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::none: return "none";
    case FilterKind::exact: return "exact";
    case FilterKind::partial: return "partial";
  }
  return "none";
}

FilterKind parse_filter(const std::string& name) {
  if (name == "none") return FilterKind::none;
  if (name == "exact") return FilterKind::exact;
  if (name == "partial") return FilterKind::partial;
  throw Error(ErrorKind::config, "unknown filter '" + name + "'");
}

const char* to_string(ExactFallback mode) {
  return mode == ExactFallback::unfiltered ? "unfiltered" : "partial";
}

ExactFallback parse_exact_fallback(const std::string& name) {
  if (name == "unfiltered") return ExactFallback::unfiltered;
  if (name == "partial") return ExactFallback::partial;
  throw Error(ErrorKind::config, "unknown exact_fallback '" + name + "'");
}

BinaryLabelVector binarize(const LabelVector& labels) {
  BinaryLabelVector bits;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    bits.bits[i] = labels[i] == LabelState::positive;
  }
  bits.fix_other();
  return bits;
}

FilterOutcome exact_filter(const RankedList& ranked,
                           const BinaryLabelVector& inference_labels,
                           const LabelIndex& label_index,
                           ExactFallback fallback) {
  FilterOutcome outcome;
  outcome.applied = FilterKind::exact;
  for (const auto& entry : ranked.entries) {
    if (lookup(label_index, entry.study_id) == inference_labels) {
      outcome.ranked.entries.push_back(entry);
    }
  }
  outcome.matched_count = static_cast<int>(outcome.ranked.size());
  if (outcome.matched_count == 0 && !ranked.empty()) {
    // An unrealistic inferred label set can match nothing in the retrieval
    // set; keep generation alive with the configured fallback ordering.
    outcome.fallback_used = true;
    outcome.ranked = fallback == ExactFallback::partial
                         ? partial_filter(ranked, inference_labels,
                                          label_index)
                               .ranked
                         : ranked;
  }
  return outcome;
}

FilterOutcome partial_filter(const RankedList& ranked,
                             const BinaryLabelVector& inference_labels,
                             const LabelIndex& label_index) {
  FilterOutcome outcome;
  outcome.applied = FilterKind::partial;
  outcome.ranked = ranked;

  std::vector<int> overlaps(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    overlaps[i] =
        lookup(label_index, ranked.entries[i].study_id).overlap(inference_labels);
  }
  std::vector<std::size_t> order(ranked.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return overlaps[a] > overlaps[b];
                   });
  for (std::size_t i = 0; i < order.size(); ++i) {
    outcome.ranked.entries[i] = ranked.entries[order[i]];
  }
  outcome.matched_count = static_cast<int>(outcome.ranked.size());
  return outcome;
}

FilterOutcome no_filter(const RankedList& ranked) {
  FilterOutcome outcome;
  outcome.applied = FilterKind::none;
  outcome.ranked = ranked;
  outcome.matched_count = static_cast<int>(ranked.size());
  return outcome;
}

FilterOutcome apply_filter(FilterKind kind, const RankedList& ranked,
                           const BinaryLabelVector& inference_labels,
                           const LabelIndex& label_index,
                           ExactFallback fallback) {
  switch (kind) {
    case FilterKind::none: return no_filter(ranked);
    case FilterKind::exact:
      return exact_filter(ranked, inference_labels, label_index, fallback);
    case FilterKind::partial:
      return partial_filter(ranked, inference_labels, label_index);
  }
  return no_filter(ranked);
}

}  // namespace lbrg

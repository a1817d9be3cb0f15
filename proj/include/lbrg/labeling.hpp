#pragma once

#include <string>
#include <unordered_map>

#include "lbrg/labels.hpp"
#include "lbrg/retrieval.hpp"

namespace lbrg {

enum class FilterKind { none, exact, partial };

const char* to_string(FilterKind kind);
FilterKind parse_filter(const std::string& name);

// What to do when the exact filter matches nothing.
enum class ExactFallback { unfiltered, partial };

const char* to_string(ExactFallback mode);
ExactFallback parse_exact_fallback(const std::string& name);

struct FilterOutcome {
  RankedList ranked;
  FilterKind applied = FilterKind::none;
  bool fallback_used = false;  // exact filter matched nothing
  int matched_count = 0;
};

using LabelIndex = std::unordered_map<std::string, BinaryLabelVector>;

// bits[i] = (values[i] == positive) for the 14 labels; the Other bit is set
// exactly when none of them is positive.
BinaryLabelVector binarize(const LabelVector& labels);

// Keeps, in order, exactly the entries whose full 15-bit label vector equals
// the inference labels. When nothing matches, falls back per `fallback`
// (default: the unfiltered input) with fallback_used set.
FilterOutcome exact_filter(const RankedList& ranked,
                           const BinaryLabelVector& inference_labels,
                           const LabelIndex& label_index,
                           ExactFallback fallback = ExactFallback::unfiltered);

// Stable re-sort by the count of positive labels shared with the inference
// labels (all 15 positions), descending; equal counts keep their image
// similarity order. Output length always equals input length.
FilterOutcome partial_filter(const RankedList& ranked,
                             const BinaryLabelVector& inference_labels,
                             const LabelIndex& label_index);

// Identity.
FilterOutcome no_filter(const RankedList& ranked);

FilterOutcome apply_filter(FilterKind kind, const RankedList& ranked,
                           const BinaryLabelVector& inference_labels,
                           const LabelIndex& label_index,
                           ExactFallback fallback = ExactFallback::unfiltered);

}  // namespace lbrg

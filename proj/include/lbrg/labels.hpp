#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace lbrg {

// The 14 standardized chest X-ray observation labels, in the canonical
// alphabetical order used everywhere labels are serialized or rendered.
inline constexpr std::size_t kNumLabels = 14;
inline constexpr std::size_t kOtherIndex = 14;  // derived 15th bit

inline constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "Atelectasis",
    "Cardiomegaly",
    "Consolidation",
    "Edema",
    "Enlarged Cardiomediastinum",
    "Fracture",
    "Lung Lesion",
    "Lung Opacity",
    "No Finding",
    "Pleural Effusion",
    "Pleural Other",
    "Pneumonia",
    "Pneumothorax",
    "Support Devices",
};

inline constexpr std::string_view kOtherLabelName = "Other";

// Returns the canonical index of a label name, or nullopt if unknown.
std::optional<std::size_t> label_index(std::string_view name);

// Observation state as extracted from report text.
// On disk: 1 = positive, 0 = negative, -1 = uncertain, absent = unmentioned.
enum class LabelState { positive, negative, uncertain, unmentioned };

struct LabelVector {
  std::array<LabelState, kNumLabels> values{};

  LabelVector() { values.fill(LabelState::unmentioned); }

  LabelState operator[](std::size_t i) const { return values[i]; }
  LabelState& operator[](std::size_t i) { return values[i]; }

  bool operator==(const LabelVector&) const = default;
};

// 15 binary bits: the 14 labels plus the derived "Other" bit, which is true
// exactly when none of the 14 is positive.
struct BinaryLabelVector {
  std::array<bool, kNumLabels + 1> bits{};

  bool operator[](std::size_t i) const { return bits[i]; }

  bool other() const { return bits[kOtherIndex]; }

  // Re-derives the Other bit from bits 0..13.
  void fix_other();

  // Count of shared positive bits over all 15 positions.
  int overlap(const BinaryLabelVector& rhs) const;

  bool operator==(const BinaryLabelVector&) const = default;
};

// Comma-separated positive label names in canonical order; empty string when
// no bit is set (cannot happen for a valid BinaryLabelVector).
std::string positive_names(const BinaryLabelVector& bits);

}  // namespace lbrg

#include "lbrg/labels.hpp"

namespace lbrg {

std::optional<std::size_t> label_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabelNames[i] == name) return i;
  }
  return std::nullopt;
}

void BinaryLabelVector::fix_other() {
  bool any = false;
  for (std::size_t i = 0; i < kNumLabels; ++i) any = any || bits[i];
  bits[kOtherIndex] = !any;
}

int BinaryLabelVector::overlap(const BinaryLabelVector& rhs) const {
  int count = 0;
  for (std::size_t i = 0; i <= kNumLabels; ++i) {
    if (bits[i] && rhs.bits[i]) ++count;
  }
  return count;
}

std::string positive_names(const BinaryLabelVector& bits) {
  std::string out;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (!bits.bits[i]) continue;
    if (!out.empty()) out += ", ";
    out += kLabelNames[i];
  }
  if (bits.bits[kOtherIndex]) {
    if (!out.empty()) out += ", ";
    out += kOtherLabelName;
  }
  return out;
}

}  // namespace lbrg

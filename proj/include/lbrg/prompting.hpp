#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lbrg/labels.hpp"

namespace lbrg {

enum class PromptFormat { naive, simple, verbose, instruct };

const char* to_string(PromptFormat format);
PromptFormat parse_prompt_format(const std::string& name);

inline constexpr int kPromptTemplateVersion = 1;
inline constexpr std::string_view kReportSentinel = "<<Report>>";

// One retrieved example as it appears in the prompt. Retrieval-side labels
// stay 4-valued; the inference labels are binary.
struct ExampleBlock {
  int index = 0;  // 1-based position in the prompt
  std::optional<LabelVector> labels;
  std::string text;
};

struct PromptSpec {
  PromptFormat format = PromptFormat::simple;
  std::vector<ExampleBlock> examples;
  BinaryLabelVector inference_labels;
  std::string rendered;
  int truncated_examples = 0;  // whole trailing examples dropped by the guard
};

// "Label: " + comma-separated positive names in canonical order. A 4-valued
// vector with no positives renders "Other".
std::string format_label_line_simple(const BinaryLabelVector& labels);
std::string format_label_line_simple(const LabelVector& labels);

// Four lines Positive/Negative/Uncertain/Unmentioned. Binary labels have no
// uncertain or unmentioned entries, so those categories render "None"; the
// Other pseudo-label is listed under Positive or Negative for binary vectors
// and only as a positive fallback for 4-valued ones.
std::string format_label_block_verbose(const LabelVector& labels);
std::string format_label_block_verbose(const BinaryLabelVector& labels);

// Renders the template for `format` over the examples (most-similar first)
// and the inference labels. Example text is inserted verbatim. When
// max_chars > 0 and the render overflows, whole trailing examples are
// dropped (never below one) and the drop count recorded.
PromptSpec build_prompt(PromptFormat format,
                        const std::vector<ExampleBlock>& examples,
                        const BinaryLabelVector& inference_labels,
                        std::size_t max_chars = 0);

}  // namespace lbrg

#include "lbrg/prompting.hpp"

#include "lbrg/error.hpp"
#include "lbrg/labeling.hpp"

namespace lbrg {

// Template text version 1. The wording, line breaks, and sentinel placement
// are load-bearing: generation quality and the completion postprocessor both
// depend on them, and golden files pin every byte.
namespace {

constexpr std::string_view kNaivePreamble =
    "You are an expert radiological assistant.\n"
    "Your task is to generate a radiology report after <<Report>> given "
    "context information.\n"
    "The context information contains examples of reports written for "
    "similar cases.\n"
    "Use the examples to generate a report for the current case.\n"
    "Strictly follow the instructions below to generate the reports.\n"
    "\n"
    "**Instructions**\n"
    "\n"
    "1. The report must be based on the information in the context.\n"
    "2. The report must mimic the style of the reports shown in the "
    "context.\n"
    "3. Do not generate blank reports.\n"
    "\n"
    "CONTEXT:\n";

constexpr std::string_view kLabeledIntroSimple =
    "You are an expert radiological assistant.\n"
    "Your task is to generate a radiology report after <<Report>> given "
    "context information.\n"
    "The context information contains examples of reports written for "
    "similar cases and their associated labels.\n"
    "Use the examples and their associated labels to generate a report for "
    "the current case based on the current label.\n"
    "Strictly follow the instructions below to generate the reports.\n";

constexpr std::string_view kLabeledIntroVerbose =
    "You are an expert radiological assistant.\n"
    "Your task is to generate a radiology report after <<Report>> given "
    "context information.\n"
    "The context information contains examples of reports written for "
    "similar cases and their associated labels.\n"
    "The labels provided are expert annotations.\n"
    "More information about the labels is described below.\n"
    "\n"
    "The individual labels used represent common chest radiographic "
    "observations and fall under four categories: 'Positive', 'Negative', "
    "'Uncertain' and 'Unmentioned'.\n"
    "These categories correspond to the mention or presence of the labels "
    "or their equivalent in the report.\n"
    "Below is a description and example of each of the label categories:\n"
    "1. 'Positive': A label is positive if the associated observation or "
    "disease is stated as present in the report, for example: 'moderate "
    "bilateral effusions observed'.\n"
    "2. 'Negative': A label is negative if the associated observation or "
    "disease is stated as absent in the report, for example: 'no evidence "
    "of pulmonary edema'.\n"
    "3. 'Uncertain': A label is uncertain if there is ambiguity about the "
    "presence or absence of the associated observation or disease in the "
    "report, for example: 'pneumonia cannot be excluded in the appropriate "
    "clinical context'.\n"
    "4. 'Unmentioned': A label is unmentioned if there is no mention of the "
    "associated observation or disease in report.\n"
    "\n"
    "Use the examples, their associated labels, and the label descriptions "
    "to generate a report for the current case based on the current label.\n"
    "Strictly follow the instructions below to generate the reports.\n";

constexpr std::string_view kBaseInstructions =
    "\n"
    "**Instructions**\n"
    "\n"
    "1. The report must be based on the information in the context and the "
    "current label.\n"
    "2. The report must mimic the style of the reports shown in the "
    "context.\n"
    "3. Do not generate blank reports.\n";

constexpr std::string_view kInstructExtras =
    "4. Ensure that the positive labels are clearly described as being "
    "present in the report, using example language from the context.\n"
    "5. Ensure that the negative labels are clearly described as being "
    "absent in the report, using example language from the context.\n"
    "6. Describe the uncertain labels as necessary.\n"
    "7. Ensure that the unmentioned labels are not mentioned in the "
    "report.\n";

constexpr std::string_view kContextHeader = "\nCONTEXT:\n";

constexpr std::string_view kNaiveTail =
    "Now generate the report for the current case.\n"
    "Always generate reports based on the examples shown.\n";

constexpr std::string_view kLabeledTail =
    "Now generate the report for the current case using its label below.\n"
    "Always generate reports based on the examples shown.\n";

std::string join_or_none(const std::vector<std::string_view>& names) {
  if (names.empty()) return "None";
  std::string out;
  for (const auto& name : names) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

std::string verbose_block(const std::vector<std::string_view>& positive,
                          const std::vector<std::string_view>& negative,
                          const std::vector<std::string_view>& uncertain,
                          const std::vector<std::string_view>& unmentioned) {
  std::string out;
  out += "Positive: " + join_or_none(positive) + "\n";
  out += "Negative: " + join_or_none(negative) + "\n";
  out += "Uncertain: " + join_or_none(uncertain) + "\n";
  out += "Unmentioned: " + join_or_none(unmentioned) + "\n";
  return out;
}

LabelVector labels_or_unmentioned(const std::optional<LabelVector>& labels) {
  return labels.value_or(LabelVector{});
}

std::string render(PromptFormat format,
                   const std::vector<ExampleBlock>& examples,
                   const BinaryLabelVector& inference_labels,
                   std::size_t count) {
  std::string out;
  switch (format) {
    case PromptFormat::naive:
      out += kNaivePreamble;
      break;
    case PromptFormat::simple:
      out += kLabeledIntroSimple;
      out += kBaseInstructions;
      out += kContextHeader;
      break;
    case PromptFormat::verbose:
      out += kLabeledIntroVerbose;
      out += kBaseInstructions;
      out += kContextHeader;
      break;
    case PromptFormat::instruct:
      out += kLabeledIntroVerbose;
      out += kBaseInstructions;
      out += kInstructExtras;
      out += kContextHeader;
      break;
  }

  for (std::size_t i = 0; i < count; ++i) {
    const ExampleBlock& example = examples[i];
    out += "Example: " + std::to_string(i + 1) + "\n";
    if (format == PromptFormat::simple) {
      out += format_label_line_simple(labels_or_unmentioned(example.labels));
      out += "\n";
    } else if (format == PromptFormat::verbose ||
               format == PromptFormat::instruct) {
      out += format_label_block_verbose(labels_or_unmentioned(example.labels));
    }
    out += example.text;
    out += "\n\n";
  }

  if (format == PromptFormat::naive) {
    out += kNaiveTail;
  } else {
    out += kLabeledTail;
    if (format == PromptFormat::simple) {
      out += format_label_line_simple(inference_labels);
      out += "\n";
    } else {
      out += format_label_block_verbose(inference_labels);
    }
  }
  out += kReportSentinel;
  return out;
}

}  // namespace

const char* to_string(PromptFormat format) {
  switch (format) {
    case PromptFormat::naive: return "naive";
    case PromptFormat::simple: return "simple";
    case PromptFormat::verbose: return "verbose";
    case PromptFormat::instruct: return "instruct";
  }
  return "simple";
}

PromptFormat parse_prompt_format(const std::string& name) {
  if (name == "naive") return PromptFormat::naive;
  if (name == "simple") return PromptFormat::simple;
  if (name == "verbose") return PromptFormat::verbose;
  if (name == "instruct") return PromptFormat::instruct;
  throw Error(ErrorKind::config, "unknown prompt format '" + name + "'");
}

std::string format_label_line_simple(const BinaryLabelVector& labels) {
  return "Label: " + positive_names(labels);
}

std::string format_label_line_simple(const LabelVector& labels) {
  return "Label: " + positive_names(binarize(labels));
}

std::string format_label_block_verbose(const LabelVector& labels) {
  std::vector<std::string_view> positive, negative, uncertain, unmentioned;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    switch (labels[i]) {
      case LabelState::positive: positive.push_back(kLabelNames[i]); break;
      case LabelState::negative: negative.push_back(kLabelNames[i]); break;
      case LabelState::uncertain: uncertain.push_back(kLabelNames[i]); break;
      case LabelState::unmentioned:
        unmentioned.push_back(kLabelNames[i]);
        break;
    }
  }
  if (positive.empty()) positive.push_back(kOtherLabelName);
  return verbose_block(positive, negative, uncertain, unmentioned);
}

std::string format_label_block_verbose(const BinaryLabelVector& labels) {
  std::vector<std::string_view> positive, negative;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    (labels[i] ? positive : negative).push_back(kLabelNames[i]);
  }
  (labels.other() ? positive : negative).push_back(kOtherLabelName);
  return verbose_block(positive, negative, {}, {});
}

PromptSpec build_prompt(PromptFormat format,
                        const std::vector<ExampleBlock>& examples,
                        const BinaryLabelVector& inference_labels,
                        std::size_t max_chars) {
  if (examples.empty()) {
    throw Error(ErrorKind::no_examples, "build_prompt needs >= 1 example");
  }

  PromptSpec spec;
  spec.format = format;
  spec.inference_labels = inference_labels;

  std::size_t count = examples.size();
  spec.rendered = render(format, examples, inference_labels, count);
  if (max_chars > 0) {
    // Drop whole trailing examples until the prompt fits; never go below 1.
    while (spec.rendered.size() > max_chars && count > 1) {
      --count;
      ++spec.truncated_examples;
      spec.rendered = render(format, examples, inference_labels, count);
    }
  }
  spec.examples.assign(examples.begin(), examples.begin() + count);
  for (std::size_t i = 0; i < count; ++i) {
    spec.examples[i].index = static_cast<int>(i) + 1;
  }
  return spec;
}

}  // namespace lbrg

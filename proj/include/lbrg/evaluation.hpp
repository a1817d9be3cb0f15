#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbrg/labels.hpp"

namespace lbrg {

// Shared tokenizer for BLEU, ROUGE, and the keyword labeler: lowercase,
// split on runs of non-alphanumeric characters. Pinned here so scores stay
// reproducible across platforms.
std::vector<std::string> tokenize(std::string_view text);

struct MetricFlags {
  bool degenerate_input = false;  // empty after tokenization, scored 0
};

// BLEU-4 over whole reports: geometric mean of clipped n-gram precisions,
// n = 1..4, times the brevity penalty exp(min(0, 1 - r/c)). Unsmoothed by
// default: any zero precision gives 0. smoothing adds one to each n-gram
// numerator and denominator for n >= 2.
double bleu4(const std::string& candidate, const std::string& reference,
             bool smoothing = false, MetricFlags* flags = nullptr);

// LCS-based F1 over the shared tokenizer.
double rouge_l(const std::string& candidate, const std::string& reference,
               MetricFlags* flags = nullptr);

// Labels report text over the 14 observation labels; the Other bit follows
// the usual derivation but is excluded from metrics.
class ReportLabeler {
 public:
  virtual ~ReportLabeler() = default;
  virtual BinaryLabelVector label(const std::string& text) const = 0;
};

struct LabelF1Result {
  double f1 = 0.0;
  bool both_empty = false;  // no positives on either side, scored 1.0
};

// Per-report F1 over the 14 labels between labeler(generated) and
// labeler(actual). Both sides empty counts as agreement (1.0); exactly one
// side empty scores 0.
double label_f1(const std::string& actual, const std::string& generated,
                const ReportLabeler& labeler,
                LabelF1Result* detail = nullptr);

// Keyword matcher standing in for neural report labelers at desk scale.
// A label is positive iff any of its keywords matches as a whole-word token
// sequence with no negator within `negation_window` tokens before the match.
class KeywordLabeler : public ReportLabeler {
 public:
  using Lexicon = std::map<std::string, std::vector<std::string>>;

  // The lexicon must cover all 14 labels (IncompleteLexicon otherwise).
  explicit KeywordLabeler(const Lexicon& lexicon, int negation_window = 3,
                          std::vector<std::string> negators = {
                              "no", "without", "negative", "free", "absent"});

  BinaryLabelVector label(const std::string& text) const override;

 private:
  std::vector<std::vector<std::vector<std::string>>> keywords_;  // [label][kw][token]
  std::vector<std::string> negators_;
  int negation_window_;
};

// Lexicon file: JSON object mapping each of the 14 label names to a keyword
// array, with optional "negation_window" and "negators" keys.
KeywordLabeler load_keyword_labeler(const std::filesystem::path& path);

enum class Metric { bleu4, rouge_l, label_f1 };

const char* to_string(Metric metric);
Metric parse_metric(const std::string& name);

struct MetricRow {
  std::string study_id;
  std::map<Metric, double> scores;
  std::map<Metric, bool> valid;  // false marks degenerate/convention cases
};

struct MetricAggregate {
  Metric metric = Metric::bleu4;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  bool std_error_defined = true;  // false when n < 2
};

struct RunEvaluation {
  std::vector<MetricRow> rows;  // in input record order
  std::vector<MetricAggregate> aggregates;
};

struct EvaluationInputs {
  // study_id -> generated text, in output order.
  std::vector<std::pair<std::string, std::string>> generations;
  // Reference section text per study; MissingReference when absent.
  std::function<std::optional<std::string>(const std::string&)> reference;
  const ReportLabeler* labeler = nullptr;  // required for label_f1
  std::vector<Metric> metrics = {Metric::bleu4, Metric::rouge_l,
                                 Metric::label_f1};
  bool bleu_smoothing = false;
};

RunEvaluation evaluate_run(const EvaluationInputs& inputs);

struct ComparisonResult {
  std::string metric;
  std::string system_a;
  std::string system_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double std_err_a = 0.0;
  double std_err_b = 0.0;
  double t_statistic = 0.0;
  double p_raw = 1.0;
  double p_bonferroni = 1.0;
  std::size_t n_pairs = 0;
  int n_comparisons = 1;
  bool degenerate = false;  // zero-variance differences
};

// Two-sided paired t-test with sample (n-1) standard deviation and
// Bonferroni correction p_bonferroni = min(1, p_raw * n_comparisons).
// Zero-variance differences: all-zero gives t = 0, p = 1; identical nonzero
// differences give p = 0, flagged degenerate.
ComparisonResult paired_ttest(std::span<const double> scores_a,
                              std::span<const double> scores_b,
                              int n_comparisons);

}  // namespace lbrg

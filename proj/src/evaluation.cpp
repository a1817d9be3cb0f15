#include "lbrg/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "lbrg/error.hpp"
#include "lbrg/stats.hpp"

namespace lbrg {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      current += static_cast<char>(std::tolower(uc));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

// n-gram counts keyed by the joined token string; '\x1f' cannot appear in
// tokenizer output.
std::unordered_map<std::string, int> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
  std::unordered_map<std::string, int> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double bleu4(const std::string& candidate, const std::string& reference,
             bool smoothing, MetricFlags* flags) {
  if (flags != nullptr) *flags = MetricFlags{};
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  if (cand.empty() || ref.empty()) {
    if (flags != nullptr) flags->degenerate_input = true;
    return 0.0;
  }

  double log_precision_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand_counts = ngram_counts(cand, n);
    const auto ref_counts = ngram_counts(ref, n);
    double matched = 0.0;
    double total = 0.0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) {
        matched += std::min(count, it->second);
      }
    }
    if (smoothing && n >= 2) {
      matched += 1.0;
      total += 1.0;
    }
    if (matched == 0.0 || total == 0.0) return 0.0;
    log_precision_sum += std::log(matched / total);
  }

  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = std::exp(std::min(0.0, 1.0 - r / c));
  return brevity * std::exp(log_precision_sum / 4.0);
}

double rouge_l(const std::string& candidate, const std::string& reference,
               MetricFlags* flags) {
  if (flags != nullptr) *flags = MetricFlags{};
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  if (cand.empty() || ref.empty()) {
    if (flags != nullptr) flags->degenerate_input = true;
    return 0.0;
  }

  // Two-row LCS table.
  std::vector<std::size_t> prev(ref.size() + 1, 0);
  std::vector<std::size_t> curr(ref.size() + 1, 0);
  for (std::size_t i = 1; i <= cand.size(); ++i) {
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      curr[j] = cand[i - 1] == ref[j - 1]
                    ? prev[j - 1] + 1
                    : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  const double lcs = static_cast<double>(prev[ref.size()]);
  const double p = lcs / static_cast<double>(cand.size());
  const double r = lcs / static_cast<double>(ref.size());
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double label_f1(const std::string& actual, const std::string& generated,
                const ReportLabeler& labeler, LabelF1Result* detail) {
  const BinaryLabelVector a = labeler.label(actual);
  const BinaryLabelVector g = labeler.label(generated);
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < kNumLabels; ++i) {  // Other excluded
    if (g[i] && a[i]) ++tp;
    if (g[i] && !a[i]) ++fp;
    if (!g[i] && a[i]) ++fn;
  }
  LabelF1Result result;
  if (tp + fp + fn == 0) {
    // No findings on either side is agreement.
    result.both_empty = true;
    result.f1 = 1.0;
  } else {
    result.f1 = 2.0 * tp / (2.0 * tp + fp + fn);
  }
  if (detail != nullptr) *detail = result;
  return result.f1;
}

KeywordLabeler::KeywordLabeler(const Lexicon& lexicon, int negation_window,
                               std::vector<std::string> negators)
    : negators_(std::move(negators)), negation_window_(negation_window) {
  keywords_.resize(kNumLabels);
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    auto it = lexicon.find(std::string(kLabelNames[i]));
    if (it == lexicon.end() || it->second.empty()) {
      throw Error(ErrorKind::incomplete_lexicon,
                  std::string("lexicon missing keywords for '") +
                      std::string(kLabelNames[i]) + "'");
    }
    for (const auto& keyword : it->second) {
      auto tokens = tokenize(keyword);
      if (tokens.empty()) {
        throw Error(ErrorKind::incomplete_lexicon,
                    "keyword with no tokens under '" + it->first + "'");
      }
      keywords_[i].push_back(std::move(tokens));
    }
  }
  for (auto& negator : negators_) {
    auto tokens = tokenize(negator);
    if (tokens.size() != 1) {
      throw Error(ErrorKind::incomplete_lexicon,
                  "negators must be single tokens: '" + negator + "'");
    }
    negator = tokens.front();
  }
}

BinaryLabelVector KeywordLabeler::label(const std::string& text) const {
  const auto tokens = tokenize(text);
  BinaryLabelVector bits;
  for (std::size_t label = 0; label < kNumLabels; ++label) {
    bool positive = false;
    for (const auto& keyword : keywords_[label]) {
      if (positive) break;
      if (keyword.size() > tokens.size()) continue;
      for (std::size_t start = 0; start + keyword.size() <= tokens.size();
           ++start) {
        if (!std::equal(keyword.begin(), keyword.end(),
                        tokens.begin() + static_cast<std::ptrdiff_t>(start))) {
          continue;
        }
        bool negated = false;
        const std::size_t window_begin =
            start >= static_cast<std::size_t>(negation_window_)
                ? start - static_cast<std::size_t>(negation_window_)
                : 0;
        for (std::size_t i = window_begin; i < start && !negated; ++i) {
          negated = std::find(negators_.begin(), negators_.end(), tokens[i]) !=
                    negators_.end();
        }
        if (!negated) {
          positive = true;
          break;
        }
      }
    }
    bits.bits[label] = positive;
  }
  bits.fix_other();
  return bits;
}

KeywordLabeler load_keyword_labeler(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::missing_file,
                "cannot open lexicon file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::schema, path.string() + ": " + e.what());
  }

  KeywordLabeler::Lexicon lexicon;
  int window = 3;
  std::vector<std::string> negators = {"no", "without", "negative", "free",
                                       "absent"};
  for (const auto& [key, value] : doc.items()) {
    if (key == "negation_window") {
      window = value.get<int>();
    } else if (key == "negators") {
      negators = value.get<std::vector<std::string>>();
    } else {
      if (!label_index(key).has_value()) {
        throw Error(ErrorKind::schema,
                    path.string() + ": unknown label '" + key + "'");
      }
      lexicon[key] = value.get<std::vector<std::string>>();
    }
  }
  return KeywordLabeler(lexicon, window, std::move(negators));
}

const char* to_string(Metric metric) {
  switch (metric) {
    case Metric::bleu4: return "bleu4";
    case Metric::rouge_l: return "rouge_l";
    case Metric::label_f1: return "label_f1";
  }
  return "bleu4";
}

Metric parse_metric(const std::string& name) {
  if (name == "bleu4") return Metric::bleu4;
  if (name == "rouge_l") return Metric::rouge_l;
  if (name == "label_f1") return Metric::label_f1;
  throw Error(ErrorKind::config, "unknown metric '" + name + "'");
}

RunEvaluation evaluate_run(const EvaluationInputs& inputs) {
  const bool wants_label_f1 =
      std::find(inputs.metrics.begin(), inputs.metrics.end(),
                Metric::label_f1) != inputs.metrics.end();
  if (wants_label_f1 && inputs.labeler == nullptr) {
    throw Error(ErrorKind::invalid_argument,
                "label_f1 selected but no labeler provided");
  }

  RunEvaluation out;
  out.rows.reserve(inputs.generations.size());
  for (const auto& [study_id, generated] : inputs.generations) {
    const auto reference = inputs.reference(study_id);
    if (!reference.has_value()) {
      throw Error(ErrorKind::missing_reference,
                  "no reference section for study '" + study_id + "'");
    }
    MetricRow row;
    row.study_id = study_id;
    for (Metric metric : inputs.metrics) {
      MetricFlags flags;
      double score = 0.0;
      bool valid = true;
      switch (metric) {
        case Metric::bleu4:
          score = bleu4(generated, *reference, inputs.bleu_smoothing, &flags);
          valid = !flags.degenerate_input;
          break;
        case Metric::rouge_l:
          score = rouge_l(generated, *reference, &flags);
          valid = !flags.degenerate_input;
          break;
        case Metric::label_f1: {
          LabelF1Result detail;
          score = label_f1(*reference, generated, *inputs.labeler, &detail);
          valid = !detail.both_empty;
          break;
        }
      }
      row.scores[metric] = score;
      row.valid[metric] = valid;
    }
    out.rows.push_back(std::move(row));
  }

  for (Metric metric : inputs.metrics) {
    MetricAggregate agg;
    agg.metric = metric;
    agg.n = out.rows.size();
    if (agg.n == 0) {
      agg.std_error_defined = false;
      out.aggregates.push_back(agg);
      continue;
    }
    double sum = 0.0;
    for (const auto& row : out.rows) sum += row.scores.at(metric);
    agg.mean = sum / static_cast<double>(agg.n);
    if (agg.n >= 2) {
      double ss = 0.0;
      for (const auto& row : out.rows) {
        const double d = row.scores.at(metric) - agg.mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(agg.n - 1));
      agg.std_error = sd / std::sqrt(static_cast<double>(agg.n));
    } else {
      agg.std_error_defined = false;
    }
    out.aggregates.push_back(agg);
  }
  return out;
}

ComparisonResult paired_ttest(std::span<const double> scores_a,
                              std::span<const double> scores_b,
                              int n_comparisons) {
  if (scores_a.size() != scores_b.size() || scores_a.size() < 2) {
    throw Error(ErrorKind::invalid_argument,
                "paired t-test needs equal-length score vectors with n >= 2");
  }
  if (n_comparisons < 1) {
    throw Error(ErrorKind::invalid_argument, "n_comparisons must be >= 1");
  }

  const auto n = scores_a.size();
  ComparisonResult result;
  result.n_pairs = n;
  result.n_comparisons = n_comparisons;

  auto summarize = [n](std::span<const double> v, double& mean, double& se) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(n - 1)) /
         std::sqrt(static_cast<double>(n));
  };
  summarize(scores_a, result.mean_a, result.std_err_a);
  summarize(scores_b, result.mean_b, result.std_err_b);

  std::vector<double> diff(n);
  double mean_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = scores_a[i] - scores_b[i];
    mean_d += diff[i];
  }
  mean_d /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean_d) * (d - mean_d);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  if (sd == 0.0) {
    if (mean_d == 0.0) {
      result.t_statistic = 0.0;
      result.p_raw = 1.0;
    } else {
      // All differences identical and nonzero: the statistic diverges.
      result.t_statistic = mean_d > 0 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
      result.p_raw = 0.0;
      result.degenerate = true;
    }
  } else {
    result.t_statistic = mean_d / (sd / std::sqrt(static_cast<double>(n)));
    result.p_raw = student_t_two_sided_p(result.t_statistic,
                                         static_cast<double>(n - 1));
  }
  result.p_bonferroni = std::min(1.0, result.p_raw * n_comparisons);
  return result;
}

}  // namespace lbrg

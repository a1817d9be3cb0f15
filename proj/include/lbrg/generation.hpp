#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lbrg/classifier.hpp"
#include "lbrg/corpus.hpp"
#include "lbrg/labeling.hpp"
#include "lbrg/prompting.hpp"
#include "lbrg/retrieval.hpp"

namespace lbrg {

// Decoding contract forwarded to the completion endpoint: greedy decoding
// (temperature 0) up to 512 tokens with a set seed, unless overridden.
struct LlmConfig {
  std::string endpoint_url;  // http(s)://host[:port]/path or mock://<mode>
  std::string model_name;
  int max_tokens = 512;
  double temperature = 0.0;
  uint64_t seed = 0;
  int request_timeout_s = 60;
  int max_retries = 3;
  int backoff_ms = 250;  // doubled per retry
};

// Name of the environment variable holding the endpoint bearer token.
inline constexpr const char* kAuthTokenEnvVar = "LBRG_LLM_TOKEN";

struct LlmMeta {
  std::string model_name;
  long latency_ms = 0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int retries = 0;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Returns the raw completion text; meta is optional.
  virtual std::string complete(const std::string& prompt, LlmMeta* meta) = 0;
};

// Dispatches on the endpoint_url scheme:
//   http:// or https://  completion-style HTTP+JSON endpoint
//   mock://first-example deterministic offline client returning the text of
//                        Example 1 parsed back out of the prompt
//   mock://echo          returns the prompt itself
std::unique_ptr<LlmClient> make_llm_client(const LlmConfig& config);

// One-shot convenience over make_llm_client.
std::string complete(const std::string& prompt, const LlmConfig& config);

// Strips an echoed leading sentinel, truncates at any further sentinel
// occurrence (the model starting a second report), and trims whitespace.
std::string postprocess_completion(const std::string& completion);

enum class LabelSource { predicted, extracted };

const char* to_string(LabelSource source);
LabelSource parse_label_source(const std::string& name);

struct FilterSummary {
  FilterKind applied = FilterKind::none;
  bool fallback_used = false;
  int matched_count = 0;
};

struct GenerationRecord {
  std::string study_id;
  std::string prompt_hash;  // sha256 of the rendered prompt
  std::vector<std::string> retrieved_ids;
  FilterSummary filter;
  BinaryLabelVector inference_labels;
  LabelSource label_source = LabelSource::predicted;
  std::string generated_text;
  LlmMeta llm_meta;
  bool fallback_used = false;
  int truncated_examples = 0;
  // Set instead of the fields above when the study failed under keep_going.
  std::optional<std::string> error_kind;
  std::optional<std::string> error_message;

  bool failed() const { return error_kind.has_value(); }
};

// Data access used on the generation path. Kept as replaceable functions so
// tests can instrument reads and prove the target study's reference text and
// extracted labels are never touched in predicted mode.
struct DataSource {
  std::function<const EmbeddingRecord*(const std::string&)> embedding;
  std::function<const LabelVector*(const std::string&)> extracted_labels;
  std::function<std::optional<std::string>(const std::string&)> section_text;

  static DataSource from_corpus(const Corpus& corpus, SectionKind section);
};

struct PipelineSettings {
  FilterKind filter = FilterKind::exact;
  ExactFallback exact_fallback = ExactFallback::unfiltered;
  PromptFormat format = PromptFormat::simple;
  int k = kDefaultTopK;
  LabelSource label_source = LabelSource::predicted;
  std::size_t max_prompt_chars = 0;  // 0 = unlimited
};

// Everything run_pipeline needs, built once per batch. The retrieval store
// and binarized retrieval labels cover exactly manifest.retrieval_ids.
struct PipelineContext {
  CorpusManifest manifest;
  EmbeddingStore store;
  LabelIndex retrieval_labels;
  DataSource data;
  const ClassifierEnsemble* ensemble = nullptr;  // required for predicted
  PipelineSettings settings;
};

PipelineContext build_pipeline_context(const Corpus& corpus,
                                       SectionKind section,
                                       const PipelineSettings& settings,
                                       const ClassifierEnsemble* ensemble);

// Runs retrieval, label boosting, prompting, and completion for one
// inference study.
GenerationRecord run_pipeline(const PipelineContext& context,
                              const std::string& study_id, LlmClient& llm);

struct BatchOptions {
  int max_inflight = 4;
  bool keep_going = false;
};

struct BatchResult {
  std::vector<GenerationRecord> records;  // manifest order
  std::size_t failures = 0;
};

// Processes every manifest inference study with a bounded number of
// concurrent completions. Output order is manifest order regardless of
// completion order; failures become error records (and stop the batch early
// unless keep_going).
BatchResult run_batch(const PipelineContext& context, LlmClient& llm,
                      const BatchOptions& options = {});

}  // namespace lbrg

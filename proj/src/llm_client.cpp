#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lbrg/error.hpp"
#include "lbrg/generation.hpp"

namespace lbrg {

namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::config, "endpoint_url missing scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/v1/completions"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool transient_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(LlmConfig config)
      : config_(std::move(config)), url_(parse_url(config_.endpoint_url)) {}

  std::string complete(const std::string& prompt, LlmMeta* meta) override {
    json request = {{"model", config_.model_name},
                    {"prompt", prompt},
                    {"max_tokens", config_.max_tokens},
                    {"temperature", config_.temperature},
                    {"seed", config_.seed},
                    {"stream", false}};
    const std::string body = request.dump();

    httplib::Headers headers;
    if (const char* token = std::getenv(kAuthTokenEnvVar);
        token != nullptr && token[0] != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const auto start = std::chrono::steady_clock::now();
    int retries = 0;
    bool empty_retry_done = false;
    Error last_error(ErrorKind::endpoint_unreachable, "no attempt made");

    // One attempt per loop iteration; transport failures and transient
    // statuses consume the retry budget, an empty completion earns exactly
    // one extra attempt.
    while (true) {
      try {
        const std::string text = attempt(body, headers, meta);
        if (text.empty()) {
          if (!empty_retry_done) {
            empty_retry_done = true;
            ++retries;
            continue;
          }
          throw Error(ErrorKind::empty_completion,
                      "endpoint returned zero-length completion text");
        }
        if (meta != nullptr) {
          meta->model_name = config_.model_name;
          meta->retries = retries;
          meta->latency_ms = std::chrono::duration_cast<
                                 std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        }
        return text;
      } catch (const Error& e) {
        const bool retryable = e.kind() == ErrorKind::endpoint_unreachable ||
                               e.kind() == ErrorKind::timeout ||
                               (e.kind() == ErrorKind::http_status &&
                                transient_status(e.status()));
        if (!retryable || retries >= config_.max_retries) throw;
        last_error = e;
      }
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_ms << retries));
      ++retries;
    }
  }

 private:
  std::string attempt(const std::string& body, const httplib::Headers& headers,
                      LlmMeta* meta) {
    httplib::Client client(url_.base);
    client.set_connection_timeout(config_.request_timeout_s, 0);
    client.set_read_timeout(config_.request_timeout_s, 0);
    client.set_write_timeout(config_.request_timeout_s, 0);

    auto res = client.Post(url_.path, headers, body, "application/json");
    if (!res) {
      switch (res.error()) {
        case httplib::Error::ConnectionTimeout:
        case httplib::Error::Read:
        case httplib::Error::Write:
          throw Error(ErrorKind::timeout,
                      "request to " + config_.endpoint_url + " timed out");
        default:
          throw Error(ErrorKind::endpoint_unreachable,
                      "cannot reach " + config_.endpoint_url + ": " +
                          httplib::to_string(res.error()));
      }
    }
    if (res->status != 200) {
      throw Error(ErrorKind::http_status,
                  "endpoint returned HTTP " + std::to_string(res->status),
                  res->status);
    }

    json response;
    try {
      response = json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::schema,
                  std::string("unparseable completion response: ") + e.what());
    }
    std::string text;
    if (response.contains("choices") && response["choices"].is_array() &&
        !response["choices"].empty() &&
        response["choices"][0].contains("text")) {
      text = response["choices"][0]["text"].get<std::string>();
    } else if (response.contains("content")) {
      // llama.cpp-style /completion body
      text = response["content"].get<std::string>();
    } else {
      throw Error(ErrorKind::schema,
                  "completion response has neither choices[0].text nor "
                  "content");
    }
    if (meta != nullptr && response.contains("usage")) {
      const auto& usage = response["usage"];
      meta->prompt_tokens = usage.value("prompt_tokens", 0);
      meta->completion_tokens = usage.value("completion_tokens", 0);
    }
    return text;
  }

  LlmConfig config_;
  ParsedUrl url_;
};

// Returns the report text of Example 1 by parsing it back out of the
// rendered prompt; deterministic and offline, for tests and dry runs.
class FirstExampleMockClient final : public LlmClient {
 public:
  explicit FirstExampleMockClient(std::string model_name)
      : model_name_(std::move(model_name)) {}

  std::string complete(const std::string& prompt, LlmMeta* meta) override {
    if (meta != nullptr) *meta = LlmMeta{.model_name = model_name_};

    static constexpr std::string_view kMarker = "Example: 1\n";
    const auto marker_pos = prompt.find(kMarker);
    if (marker_pos == std::string::npos) {
      throw Error(ErrorKind::invalid_argument,
                  "prompt has no 'Example: 1' block to echo");
    }
    std::size_t pos = marker_pos + kMarker.size();
    // Skip the label lines of labeled formats.
    static constexpr std::string_view kLabelPrefixes[] = {
        "Label: ", "Positive: ", "Negative: ", "Uncertain: ", "Unmentioned: "};
    std::string text;
    while (pos < prompt.size()) {
      auto line_end = prompt.find('\n', pos);
      if (line_end == std::string::npos) line_end = prompt.size();
      const std::string_view line(prompt.data() + pos, line_end - pos);
      bool is_label = false;
      for (auto prefix : kLabelPrefixes) {
        if (line.starts_with(prefix)) {
          is_label = true;
          break;
        }
      }
      if (!is_label) {
        if (line.empty()) break;  // blank line ends the example block
        if (!text.empty()) text += '\n';
        text += line;
      }
      pos = line_end + 1;
    }
    return text;
  }

 private:
  std::string model_name_;
};

class EchoMockClient final : public LlmClient {
 public:
  explicit EchoMockClient(std::string model_name)
      : model_name_(std::move(model_name)) {}

  std::string complete(const std::string& prompt, LlmMeta* meta) override {
    if (meta != nullptr) *meta = LlmMeta{.model_name = model_name_};
    return prompt;
  }

 private:
  std::string model_name_;
};

}  // namespace

std::unique_ptr<LlmClient> make_llm_client(const LlmConfig& config) {
  const std::string& url = config.endpoint_url;
  if (url.starts_with("mock://")) {
    const std::string mode = url.substr(7);
    if (mode == "first-example") {
      return std::make_unique<FirstExampleMockClient>(config.model_name);
    }
    if (mode == "echo") {
      return std::make_unique<EchoMockClient>(config.model_name);
    }
    throw Error(ErrorKind::config, "unknown mock endpoint '" + url + "'");
  }
  if (url.starts_with("http://") || url.starts_with("https://")) {
    return std::make_unique<HttpLlmClient>(config);
  }
  throw Error(ErrorKind::config,
              "endpoint_url must be http(s):// or mock://: '" + url + "'");
}

std::string complete(const std::string& prompt, const LlmConfig& config) {
  return make_llm_client(config)->complete(prompt, nullptr);
}

}  // namespace lbrg

#pragma once

#include <stdexcept>
#include <string>

namespace lbrg {

// Every failure mode the library reports, so callers and tests can match on
// the kind instead of parsing messages.
enum class ErrorKind {
  missing_file,
  schema,
  dangling_reference,
  dimension_mismatch,
  split_violation,
  no_views,
  empty_retrieval_set,
  zero_vector,
  empty_store,
  unknown_study,
  no_examples,
  endpoint_unreachable,
  http_status,
  timeout,
  empty_completion,
  missing_embedding,
  missing_reference,
  incomplete_lexicon,
  config,
  invalid_argument,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Error(ErrorKind kind, const std::string& message, int status)
      : std::runtime_error(message), kind_(kind), status_(status) {}

  ErrorKind kind() const { return kind_; }

  // HTTP status code; only meaningful for ErrorKind::http_status.
  int status() const { return status_; }

 private:
  ErrorKind kind_;
  int status_ = 0;
};

}  // namespace lbrg

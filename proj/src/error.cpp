#include "lbrg/error.hpp"

namespace lbrg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::missing_file: return "MissingFile";
    case ErrorKind::schema: return "SchemaError";
    case ErrorKind::dangling_reference: return "DanglingReference";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::split_violation: return "SplitViolation";
    case ErrorKind::no_views: return "NoViews";
    case ErrorKind::empty_retrieval_set: return "EmptyRetrievalSet";
    case ErrorKind::zero_vector: return "ZeroVector";
    case ErrorKind::empty_store: return "EmptyStore";
    case ErrorKind::unknown_study: return "UnknownStudy";
    case ErrorKind::no_examples: return "NoExamples";
    case ErrorKind::endpoint_unreachable: return "EndpointUnreachable";
    case ErrorKind::http_status: return "HttpStatus";
    case ErrorKind::timeout: return "Timeout";
    case ErrorKind::empty_completion: return "EmptyCompletion";
    case ErrorKind::missing_embedding: return "MissingEmbedding";
    case ErrorKind::missing_reference: return "MissingReference";
    case ErrorKind::incomplete_lexicon: return "IncompleteLexicon";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

}  // namespace lbrg

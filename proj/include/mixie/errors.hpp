#pragma once

#include <stdexcept>
#include <string>

namespace mixie {

enum class ErrorCode {
  invalid_argument,
  empty_text,
  invalid_spec,
  label_not_in_set,
  variant_mismatch,
  malformed_label,
  malformed_body,
  trailing_garbage,
  arity_mismatch,
  unknown_task,
  empty_corpus,
  sample_too_large,
  parse_error,
  schema_mismatch,
  duplicate_id,
  too_few_samples,
  no_rules,
  auth_missing,
  timeout,
  remote_error,
  budget_exhausted,
  unknown_input,
  cache_corrupt,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::empty_text: return "empty_text";
    case ErrorCode::invalid_spec: return "invalid_spec";
    case ErrorCode::label_not_in_set: return "label_not_in_set";
    case ErrorCode::variant_mismatch: return "variant_mismatch";
    case ErrorCode::malformed_label: return "malformed_label";
    case ErrorCode::malformed_body: return "malformed_body";
    case ErrorCode::trailing_garbage: return "trailing_garbage";
    case ErrorCode::arity_mismatch: return "arity_mismatch";
    case ErrorCode::unknown_task: return "unknown_task";
    case ErrorCode::empty_corpus: return "empty_corpus";
    case ErrorCode::sample_too_large: return "sample_too_large";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::schema_mismatch: return "schema_mismatch";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::too_few_samples: return "too_few_samples";
    case ErrorCode::no_rules: return "no_rules";
    case ErrorCode::auth_missing: return "auth_missing";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::remote_error: return "remote_error";
    case ErrorCode::budget_exhausted: return "budget_exhausted";
    case ErrorCode::unknown_input: return "unknown_input";
    case ErrorCode::cache_corrupt: return "cache_corrupt";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mixie

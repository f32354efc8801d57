#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace templar {

enum class ErrorCode {
  invalid_argument,
  invalid_dtype,
  index_error,
  numeric_error,
  no_backend,
  ambiguous_backend,
  state_error,
  unsupported,
  wrong_backend,
  invalid_loss,
  no_grad_rule,
  signature_mismatch,
  capture_error,
  io_error,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_dtype: return "invalid-dtype";
    case ErrorCode::index_error: return "index-error";
    case ErrorCode::numeric_error: return "numeric-error";
    case ErrorCode::no_backend: return "no-backend-error";
    case ErrorCode::ambiguous_backend: return "ambiguous-backend-error";
    case ErrorCode::state_error: return "state-error";
    case ErrorCode::unsupported: return "unsupported-error";
    case ErrorCode::wrong_backend: return "wrong-backend";
    case ErrorCode::invalid_loss: return "invalid-loss";
    case ErrorCode::no_grad_rule: return "no-grad-rule";
    case ErrorCode::signature_mismatch: return "signature-mismatch";
    case ErrorCode::capture_error: return "capture-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown-error";
}

// Base of every library error. The code is the stable, machine-checkable part;
// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {
template <ErrorCode C>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& what) : Error(C, what) {}
};
}  // namespace detail

using InvalidArgument = detail::CodedError<ErrorCode::invalid_argument>;
using InvalidDType = detail::CodedError<ErrorCode::invalid_dtype>;
using IndexError = detail::CodedError<ErrorCode::index_error>;
using NumericError = detail::CodedError<ErrorCode::numeric_error>;
using NoBackendError = detail::CodedError<ErrorCode::no_backend>;
using AmbiguousBackendError = detail::CodedError<ErrorCode::ambiguous_backend>;
using StateError = detail::CodedError<ErrorCode::state_error>;
using UnsupportedError = detail::CodedError<ErrorCode::unsupported>;
using WrongBackendError = detail::CodedError<ErrorCode::wrong_backend>;
using InvalidLossError = detail::CodedError<ErrorCode::invalid_loss>;
using NoGradRuleError = detail::CodedError<ErrorCode::no_grad_rule>;
using SignatureMismatch = detail::CodedError<ErrorCode::signature_mismatch>;
using CaptureError = detail::CodedError<ErrorCode::capture_error>;
using IoError = detail::CodedError<ErrorCode::io_error>;

}  // namespace templar

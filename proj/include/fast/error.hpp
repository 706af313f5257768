#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fast {

enum class ErrorCode {
  BadRequest,          // malformed JSON, bad to_do, bad parameters
  InvalidUri,
  InvalidValue,        // non-finite number or nesting too deep
  NotFound,            // resource absent
  PayloadTooLarge,
  DuplicatePackage,
  ModuleNotAvailable,
  FunctionNotFound,
  AmbiguousFunction,
  ArityMismatch,
  UnknownParameter,
  DomainError,
  NoSolution,
  EmptyReduce,
  NotAnArray,
  UnserializableResult,
  MalformedTemplate,
  DepthExceeded,
  ParseError,
  MethodNotAllowed,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure inside the engine surfaces as a fast::Error; the gateway
/// translates the code into an HTTP status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the query parser; carries the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t position)
      : Error(ErrorCode::ParseError, std::move(message)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

}  // namespace fast

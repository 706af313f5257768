#include "fast/value.hpp"

#include <cmath>

#include "fast/error.hpp"

namespace fast {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::InvalidUri: return "InvalidUri";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::DuplicatePackage: return "DuplicatePackage";
    case ErrorCode::ModuleNotAvailable: return "ModuleNotAvailable";
    case ErrorCode::FunctionNotFound: return "FunctionNotFound";
    case ErrorCode::AmbiguousFunction: return "AmbiguousFunction";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::EmptyReduce: return "EmptyReduce";
    case ErrorCode::NotAnArray: return "NotAnArray";
    case ErrorCode::UnserializableResult: return "UnserializableResult";
    case ErrorCode::MalformedTemplate: return "MalformedTemplate";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MethodNotAllowed: return "MethodNotAllowed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

namespace {

void validate_at(const Value& v, int depth) {
  if (depth > kMaxDepth) {
    fail(ErrorCode::InvalidValue, "value nesting exceeds depth " + std::to_string(kMaxDepth));
  }
  switch (v.type()) {
    case Value::value_t::number_float:
      if (!std::isfinite(v.get<double>())) {
        fail(ErrorCode::InvalidValue, "non-finite number");
      }
      break;
    case Value::value_t::array:
    case Value::value_t::object:
      for (const auto& child : v) {
        validate_at(child, depth + 1);
      }
      break;
    default:
      break;
  }
}

constexpr double kExactIntegerLimit = 9007199254740992.0;  // 2^53

}  // namespace

void validate(const Value& v) { validate_at(v, 1); }

Value canonical(Value v) {
  switch (v.type()) {
    case Value::value_t::number_float: {
      double d = v.get<double>();
      if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < kExactIntegerLimit) {
        return Value(static_cast<std::int64_t>(d));
      }
      return v;
    }
    case Value::value_t::number_unsigned: {
      auto u = v.get<std::uint64_t>();
      if (u <= static_cast<std::uint64_t>(INT64_MAX)) {
        return Value(static_cast<std::int64_t>(u));
      }
      return v;
    }
    case Value::value_t::array:
    case Value::value_t::object:
      for (auto& child : v) {
        child = canonical(std::move(child));
      }
      return v;
    default:
      return v;
  }
}

Value number(double x) {
  if (!std::isfinite(x)) {
    fail(ErrorCode::DomainError, "result is not a finite number");
  }
  return canonical(Value(x));
}

Value parse_json(std::string_view text) {
  Value v;
  try {
    v = Value::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadRequest, std::string("malformed JSON: ") + e.what());
  }
  validate(v);
  return canonical(std::move(v));
}

Value parse_param(std::string_view text) {
  Value v = Value::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (v.is_discarded()) {
    return Value(std::string(text));
  }
  try {
    validate(v);
  } catch (const Error&) {
    return Value(std::string(text));
  }
  return canonical(std::move(v));
}

std::string dump(const Value& v) { return v.dump(); }

bool is_number(const Value& v) noexcept { return v.is_number(); }

double as_double(const Value& v, std::string_view what) {
  if (!v.is_number()) {
    fail(ErrorCode::DomainError, std::string(what) + " must be a number");
  }
  return v.get<double>();
}

}  // namespace fast

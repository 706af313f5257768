#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace fast {

/// The universal currency of both machines. Objects use std::map ordering, so
/// serialization is deterministic regardless of insertion order.
using Value = nlohmann::json;

inline constexpr int kMaxDepth = 64;

/// Checks the Value invariants: finite numbers, nesting depth <= kMaxDepth.
/// Throws InvalidValue otherwise.
void validate(const Value& v);

/// Rewrites integral doubles in (-2^53, 2^53) as integers, recursively, so
/// that 5.0 and 5 serialize identically.
Value canonical(Value v);

/// A canonical number Value for a double result. Throws DomainError when the
/// result is not finite.
Value number(double x);

/// Parses JSON text into a validated canonical Value; BadRequest on failure.
Value parse_json(std::string_view text);

/// Parses a loosely typed parameter: valid JSON yields the typed Value,
/// anything else is kept as the raw string ("35.05" -> 35.05, "abc" -> "abc").
Value parse_param(std::string_view text);

/// Compact serialization used on the wire and for byte-identity checks.
std::string dump(const Value& v);

bool is_number(const Value& v) noexcept;
double as_double(const Value& v, std::string_view what);

}  // namespace fast

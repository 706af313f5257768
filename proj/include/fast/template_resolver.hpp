#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fast/lambda_machine.hpp"
#include "fast/rest_machine.hpp"
#include "fast/value.hpp"

namespace fast::templates {

/// Template syntax inside string leaves:
///
///   {{ /rest/<path> }}
///   {{ /lambda/[<module>/]<function>?k=v&k2=v2 }}
///
/// A backslash before "{{" or "}}" yields the literal braces. Templates may
/// nest inside a lambda template's query string; inner ones resolve first.

enum class RefKind { Rest, Lambda };

struct TemplateRef {
  std::string raw;  // body between the braces, trimmed
  RefKind kind;
};

inline constexpr int kDefaultDepthLimit = 8;

/// Top-level template occurrences in string leaves, depth-first. Throws
/// MalformedTemplate for unbalanced braces, an empty body, or a body that is
/// neither a /rest/ nor a /lambda/ path.
std::vector<TemplateRef> scan(const Value& payload);

bool has_templates(const Value& payload);

/// A lambda template target after any nested templates are resolved.
struct LambdaTarget {
  std::string module;  // empty for the single-segment form
  std::string function;
  Value args;          // named arguments, each JSON-parsed with string fallback
};

LambdaTarget parse_lambda_target(std::string_view body);

class Resolver {
 public:
  Resolver(const rest::ResourceStore& store, const lambda::LambdaMachine& machine,
           int depth_limit = kDefaultDepthLimit);

  int depth_limit() const noexcept { return depth_limit_; }

  /// Replaces every template: rest refs by the stored value, lambda refs by
  /// the apply result. A string that is exactly one template becomes the
  /// typed value; an embedded template is spliced in as text (strings
  /// verbatim, other values as JSON). DepthExceeded when templates are still
  /// pending after depth_limit levels.
  Value resolve(const Value& payload) const { return resolve(payload, depth_limit_); }
  Value resolve(const Value& payload, int depth) const;

 private:
  Value resolve_string(const std::string& s, int depth) const;
  Value resolve_ref(const std::string& body, int depth) const;
  Value call_lambda(const LambdaTarget& target) const;

  const rest::ResourceStore& store_;
  const lambda::LambdaMachine& machine_;
  int depth_limit_;
};

}  // namespace fast::templates

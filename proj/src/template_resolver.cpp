#include "fast/template_resolver.hpp"

#include <set>

#include "fast/error.hpp"
#include "fast/url.hpp"

namespace fast::templates {

namespace {

constexpr std::string_view kRestPrefix = "/rest/";
constexpr std::string_view kLambdaPrefix = "/lambda/";

struct Piece {
  bool is_template;
  std::string text;  // literal text, or the raw (untrimmed) template body
};

bool at(std::string_view s, std::size_t i, std::string_view token) noexcept {
  return s.compare(i, token.size(), token) == 0;
}

bool escaped_brace(std::string_view s, std::size_t i) noexcept {
  return s[i] == '\\' && (at(s, i + 1, "{{") || at(s, i + 1, "}}"));
}

[[noreturn]] void malformed(std::string_view s, std::string_view why) {
  fail(ErrorCode::MalformedTemplate, "malformed template in \"" + std::string(s) + "\": " + std::string(why));
}

/// Splits a string leaf into literal runs and top-level template bodies.
/// Escapes are consumed here, so literal pieces are final text.
std::vector<Piece> segment(std::string_view s) {
  std::vector<Piece> pieces;
  std::string literal;
  int escaped_open = 0;
  auto flush = [&] {
    if (!literal.empty()) pieces.push_back({false, std::exchange(literal, {})});
  };

  std::size_t i = 0;
  while (i < s.size()) {
    if (escaped_brace(s, i)) {
      if (s[i + 1] == '{') ++escaped_open;
      literal.append(s.substr(i + 1, 2));
      i += 3;
    } else if (at(s, i, "{{")) {
      int depth = 1;
      std::size_t j = i + 2;
      while (j < s.size()) {
        if (escaped_brace(s, j)) {
          j += 3;
        } else if (at(s, j, "{{")) {
          ++depth;
          j += 2;
        } else if (at(s, j, "}}")) {
          if (--depth == 0) break;
          j += 2;
        } else {
          ++j;
        }
      }
      if (depth != 0) malformed(s, "unbalanced '{{'");
      flush();
      pieces.push_back({true, std::string(s.substr(i + 2, j - i - 2))});
      i = j + 2;
    } else if (at(s, i, "}}")) {
      if (escaped_open == 0) malformed(s, "unbalanced '}}'");
      --escaped_open;
      literal.append("}}");
      i += 2;
    } else {
      literal.push_back(s[i]);
      ++i;
    }
  }
  flush();
  return pieces;
}

bool may_contain_template(std::string_view s) noexcept {
  return s.find("{{") != std::string_view::npos || s.find("}}") != std::string_view::npos;
}

TemplateRef classify(std::string_view body_with_space) {
  std::string_view body = url::trim(body_with_space);
  if (body.empty()) malformed(body_with_space, "empty template");
  if (body.starts_with(kRestPrefix)) return {std::string(body), RefKind::Rest};
  if (body.starts_with(kLambdaPrefix)) return {std::string(body), RefKind::Lambda};
  malformed(body, "template must start with /rest/ or /lambda/");
}

void scan_into(const Value& v, std::vector<TemplateRef>& out) {
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (!may_contain_template(s)) return;
    for (const auto& piece : segment(s)) {
      if (!piece.is_template) continue;
      out.push_back(classify(piece.text));
      // validate nested bodies as well
      std::vector<TemplateRef> nested;
      scan_into(Value(piece.text), nested);
    }
  } else if (v.is_array() || v.is_object()) {
    for (const auto& child : v) scan_into(child, out);
  }
}

bool only_whitespace(std::string_view s) noexcept { return url::trim(s).empty(); }

}  // namespace

std::vector<TemplateRef> scan(const Value& payload) {
  std::vector<TemplateRef> out;
  scan_into(payload, out);
  return out;
}

bool has_templates(const Value& payload) { return !scan(payload).empty(); }

LambdaTarget parse_lambda_target(std::string_view body) {
  std::string_view path = body;
  std::string_view query;
  if (auto q = body.find('?'); q != std::string_view::npos) {
    path = body.substr(0, q);
    query = body.substr(q + 1);
  }
  path.remove_prefix(kLambdaPrefix.size());
  LambdaTarget target;
  if (auto slash = path.find('/'); slash != std::string_view::npos) {
    target.module = url::percent_decode(path.substr(0, slash));
    target.function = url::percent_decode(path.substr(slash + 1));
  } else {
    target.function = url::percent_decode(path);
  }
  if (target.function.empty() || target.function.find('/') != std::string::npos ||
      (path.find('/') != std::string_view::npos && target.module.empty())) {
    malformed(body, "expected /lambda/<module>/<function> or /lambda/<function>");
  }
  target.args = Value::object();
  for (const auto& [raw_key, raw_value] : url::parse_query(query)) {
    std::string key(url::trim(raw_key));
    if (key.empty()) malformed(body, "empty parameter name");
    if (target.args.contains(key)) malformed(body, "duplicate parameter '" + key + "'");
    target.args[key] = parse_param(url::trim(raw_value));
  }
  return target;
}

Resolver::Resolver(const rest::ResourceStore& store, const lambda::LambdaMachine& machine, int depth_limit)
    : store_(store), machine_(machine), depth_limit_(depth_limit) {
  if (depth_limit_ < 1) {
    fail(ErrorCode::BadRequest, "template depth limit must be at least 1");
  }
}

Value Resolver::resolve(const Value& payload, int depth) const {
  if (payload.is_string()) {
    return resolve_string(payload.get_ref<const std::string&>(), depth);
  }
  if (payload.is_array()) {
    Value out = Value::array();
    for (const auto& child : payload) out.push_back(resolve(child, depth));
    return out;
  }
  if (payload.is_object()) {
    Value out = Value::object();
    for (const auto& [key, child] : payload.items()) out[key] = resolve(child, depth);
    return out;
  }
  return payload;
}

Value Resolver::resolve_string(const std::string& s, int depth) const {
  if (!may_contain_template(s)) return Value(s);
  auto pieces = segment(s);

  std::size_t templates = 0;
  const Piece* sole = nullptr;
  bool padding_only = true;
  for (const auto& piece : pieces) {
    if (piece.is_template) {
      ++templates;
      sole = &piece;
    } else if (!only_whitespace(piece.text)) {
      padding_only = false;
    }
  }
  if (templates == 0) {
    std::string text;
    for (const auto& piece : pieces) text += piece.text;
    return Value(std::move(text));
  }
  if (depth < 1) {
    fail(ErrorCode::DepthExceeded, "template nesting exceeds depth limit " + std::to_string(depth_limit_));
  }
  if (templates == 1 && padding_only) {
    return resolve_ref(sole->text, depth);
  }
  std::string text;
  for (const auto& piece : pieces) {
    if (!piece.is_template) {
      text += piece.text;
      continue;
    }
    Value v = resolve_ref(piece.text, depth);
    text += v.is_string() ? v.get<std::string>() : dump(v);
  }
  return Value(std::move(text));
}

Value Resolver::resolve_ref(const std::string& raw_body, int depth) const {
  std::string body = raw_body;
  if (may_contain_template(body)) {
    // innermost first: nested refs are spliced into the body as text
    Value inner = resolve_string(body, depth - 1);
    body = inner.is_string() ? inner.get<std::string>() : dump(inner);
  }
  TemplateRef ref = classify(body);

  Value result;
  if (ref.kind == RefKind::Rest) {
    result = store_.get(rest::ResourceUri::parse(ref.raw));
  } else {
    result = call_lambda(parse_lambda_target(ref.raw));
  }
  if (has_templates(result)) {
    result = resolve(result, depth - 1);
  }
  return result;
}

Value Resolver::call_lambda(const LambdaTarget& target) const {
  lambda::FunctionRef ref{target.module, target.function};
  if (ref.module.empty()) {
    ref = machine_.registry().resolve_unqualified(target.function, [&](const lambda::Function& fn) {
      return lambda::accepts_payload(fn, target.args);
    });
  }
  auto fn = machine_.lookup(ref);
  return lambda::to_value(machine_.run(*fn, lambda::Combinator::Apply, target.args));
}

}  // namespace fast::templates

#include "fast/gateway.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "fast/query_language.hpp"
#include "fast/url.hpp"

namespace fast::gateway {

namespace {

constexpr std::array<std::string_view, 8> kReserved = {"data", "uri", "to_do", "to_uri", "fns", "module", "function", "q"};

WireResponse ok(Value body) { return {200, std::move(body)}; }

WireResponse error_response(int status, std::string message) {
  return {status, Value{{"message", std::move(message)}}};
}

[[noreturn]] void method_not_allowed(const WireRequest& req) {
  fail(ErrorCode::MethodNotAllowed, "Method " + req.method + " not allowed on " + req.path);
}

/// Form-encoded bodies are accepted, but a body that parses as JSON wins over
/// a form content type (curl -d labels everything as a form).
bool is_form(const WireRequest& req) {
  if (!req.content_type.starts_with("application/x-www-form-urlencoded")) return false;
  return !nlohmann::json::accept(req.body);
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t slash = path.find('/', start);
    out.emplace_back(path.substr(start, slash == std::string_view::npos ? path.npos : slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (!out.empty() && out.front().empty()) out.erase(out.begin());
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::string as_text(const Value& v, std::string_view field) {
  if (!v.is_string()) fail(ErrorCode::BadRequest, "'" + std::string(field) + "' must be a string");
  return v.get<std::string>();
}

/// Arguments of a /lambda or /fast call gathered from body and parameters.
struct CallArgs {
  std::optional<Value> data;
  std::optional<std::string> uri;
  std::optional<std::string> to_do;
  std::optional<std::string> to_uri;
  std::optional<Value> fns;
  std::optional<std::string> module;
  std::optional<std::string> function;
};

CallArgs collect_args(const WireRequest& req) {
  CallArgs args;
  auto params = req.params;
  bool json_body = false;

  if (is_form(req)) {
    auto form = url::parse_query(req.body, true);
    params.insert(params.end(), form.begin(), form.end());
  } else if (!url::trim(req.body).empty()) {
    Value body = parse_json(req.body);
    json_body = true;
    bool container = body.is_object() && std::any_of(body.items().begin(), body.items().end(),
                                                      [](const auto& kv) { return is_reserved_param(kv.key()); });
    if (container) {
      if (body.contains("data")) args.data = body["data"];
      if (body.contains("uri")) args.uri = as_text(body["uri"], "uri");
      if (body.contains("to_do")) args.to_do = as_text(body["to_do"], "to_do");
      if (body.contains("to_uri")) args.to_uri = as_text(body["to_uri"], "to_uri");
      if (body.contains("fns")) args.fns = body["fns"];
      if (body.contains("module")) args.module = as_text(body["module"], "module");
      if (body.contains("function")) args.function = as_text(body["function"], "function");
    } else {
      args.data = std::move(body);
    }
  }

  Value free = Value::object();
  for (const auto& [key, value] : params) {
    if (key == "data") {
      if (!args.data) {
        try {
          args.data = parse_json(value);
        } catch (const Error&) {
          fail(ErrorCode::BadRequest, "malformed 'data' parameter: expected URL-encoded JSON");
        }
      }
    } else if (key == "uri") {
      if (!args.uri) args.uri = value;
    } else if (key == "to_do") {
      if (!args.to_do) args.to_do = value;
    } else if (key == "to_uri") {
      if (!args.to_uri) args.to_uri = value;
    } else if (key == "fns") {
      if (!args.fns) {
        Value parsed = parse_param(value);
        if (parsed.is_array()) {
          args.fns = parsed;
        } else {
          // plain comma list: fns=price,delta
          Value list = Value::array();
          std::size_t start = 0;
          while (start <= value.size()) {
            std::size_t comma = value.find(',', start);
            auto name = url::trim(std::string_view(value).substr(start, comma == std::string::npos ? std::string::npos
                                                                                                      : comma - start));
            if (!name.empty()) list.push_back(std::string(name));
            if (comma == std::string::npos) break;
            start = comma + 1;
          }
          args.fns = list;
        }
      }
    } else if (key == "module") {
      if (!args.module) args.module = value;
    } else if (key == "function") {
      if (!args.function) args.function = value;
    } else if (!is_reserved_param(key)) {
      free[std::string(url::trim(key))] = parse_param(url::trim(value));
    }
  }
  // free parameters are arguments only when nothing else supplies data
  if (!args.data && !json_body && !free.empty()) {
    args.data = std::move(free);
  }
  return args;
}

lambda::Combinator combinator_of(const CallArgs& args) {
  if (!args.to_do) return lambda::Combinator::Apply;
  auto comb = lambda::parse_combinator(*args.to_do);
  if (!comb) {
    fail(ErrorCode::BadRequest, "to_do must be one of apply, map, reduce, filter; got '" + *args.to_do + "'");
  }
  return *comb;
}

std::vector<std::string> fn_names(const Value& fns) {
  if (!fns.is_array() || fns.empty()) {
    fail(ErrorCode::BadRequest, "'fns' must be a non-empty list of function names");
  }
  std::vector<std::string> out;
  for (const auto& f : fns) {
    std::string name = as_text(f, "fns");
    if (std::find(out.begin(), out.end(), name) != out.end()) {
      fail(ErrorCode::BadRequest, "duplicate function '" + name + "' in fns");
    }
    out.push_back(std::move(name));
  }
  return out;
}

}  // namespace

bool is_reserved_param(std::string_view name) noexcept {
  return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end();
}

int status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::InvalidUri:
    case ErrorCode::InvalidValue:
    case ErrorCode::AmbiguousFunction:
    case ErrorCode::MalformedTemplate:
    case ErrorCode::DepthExceeded:
    case ErrorCode::ParseError:
      return 400;
    case ErrorCode::NotFound:
    case ErrorCode::ModuleNotAvailable:
    case ErrorCode::FunctionNotFound:
      return 404;
    case ErrorCode::MethodNotAllowed:
      return 405;
    case ErrorCode::PayloadTooLarge:
      return 413;
    case ErrorCode::ArityMismatch:
    case ErrorCode::UnknownParameter:
      return 422;
    case ErrorCode::DuplicatePackage:
    case ErrorCode::DomainError:
    case ErrorCode::NoSolution:
    case ErrorCode::EmptyReduce:
    case ErrorCode::NotAnArray:
    case ErrorCode::UnserializableResult:
    case ErrorCode::Internal:
      return 500;
  }
  return 500;
}

Gateway::Gateway(rest::ResourceStore& store, const lambda::LambdaMachine& machine, GatewayOptions options)
    : store_(store), machine_(machine), options_(std::move(options)), resolver_(store, machine, options_.depth_limit) {}

WireResponse Gateway::route(const WireRequest& req) const {
  try {
    auto segments = split_path(req.path);
    if (segments.empty()) {
      return error_response(404, "Not found");
    }
    const std::string& head = segments.front();
    std::optional<RouteKind> kind;
    if (head == "healthz" && segments.size() == 1) kind = RouteKind::Health;
    else if (head == "query" && segments.size() == 1) kind = RouteKind::Query;
    else if (head == "rest") kind = RouteKind::Rest;
    else if (head == "lambda" && (segments.size() == 2 || segments.size() == 3)) kind = RouteKind::Lambda;
    else if (head == "fast" && segments.size() <= 3) kind = RouteKind::Fast;
    if (!kind) {
      return error_response(404, "Not found");
    }
    if (options_.access && !options_.access(req, *kind)) {
      return error_response(403, "Forbidden");
    }
    switch (*kind) {
      case RouteKind::Health:
        if (req.method != "GET") method_not_allowed(req);
        return ok(Value{{"status", "ok"}});
      case RouteKind::Query:
        return handle_query(req);
      case RouteKind::Rest:
        return handle_rest(req);
      case RouteKind::Lambda:
        if (segments.size() == 3) return handle_lambda(req, segments[1], segments[2]);
        return handle_lambda(req, {}, segments[1]);
      case RouteKind::Fast:
        return handle_fast(req, segments.size() > 1 ? segments[1] : std::string{},
                           segments.size() > 2 ? segments[2] : std::string{});
    }
    return error_response(404, "Not found");
  } catch (const ParseError& e) {
    WireResponse r = error_response(400, e.what());
    r.body["position"] = e.position();
    return r;
  } catch (const Error& e) {
    return error_response(status_for(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, std::string("Server Error ") + e.what());
  }
}

WireResponse Gateway::handle_rest(const WireRequest& req) const {
  const bool write = req.method == "POST" || req.method == "PUT";
  if (!write && req.method != "GET" && req.method != "DELETE") method_not_allowed(req);
  auto uri = rest::ResourceUri::parse(req.path);

  if (req.method == "GET") {
    bool children = std::any_of(req.params.begin(), req.params.end(),
                                [](const auto& kv) { return kv.first == "children"; });
    if (children) {
      Value list = Value::array();
      for (const auto& child : store_.list_children(uri)) list.push_back(child.str());
      return ok(std::move(list));
    }
    return ok(store_.get(uri));
  }
  if (req.method == "DELETE") {
    return ok(store_.remove(uri));
  }

  if (req.body.size() > store_.payload_limit()) {
    fail(ErrorCode::PayloadTooLarge,
         "payload exceeds limit of " + std::to_string(store_.payload_limit()) + " bytes");
  }
  Value value;
  if (is_form(req)) {
    value = Value::object();
    for (const auto& [k, v] : url::parse_query(req.body, true)) value[k] = parse_param(v);
  } else {
    if (url::trim(req.body).empty()) fail(ErrorCode::BadRequest, "missing request body");
    value = parse_json(req.body);
  }
  if (value.is_object() && value.size() == 1 && value.contains("data")) {
    value = value["data"];
  } else if (value.is_object() && value.size() == 1 && value.contains("query") && value["query"].is_string()) {
    query::Expr expr = query::parse(value["query"].get<std::string>());
    if (std::holds_alternative<query::PostTo>(expr.node)) {
      fail(ErrorCode::BadRequest, "a stored query must not itself post to a resource");
    }
    value = query::Evaluator(store_, machine_).evaluate(expr);
  }
  return ok(store_.post(uri, std::move(value)));
}

WireResponse Gateway::handle_lambda(const WireRequest& req, std::string module, std::string function) const {
  if (req.method != "GET" && req.method != "POST") method_not_allowed(req);
  if (!module.empty() && !machine_.registry().has_module(module)) {
    fail(ErrorCode::ModuleNotAvailable, "Module not available");
  }
  CallArgs args = collect_args(req);
  const auto comb = combinator_of(args);

  Value data = Value::object();
  if (args.uri) {
    data = store_.get(rest::ResourceUri::parse(*args.uri));
  } else if (args.data) {
    data = std::move(*args.data);
  }
  data = resolver_.resolve(data);

  lambda::FunctionRef ref{module, function};
  if (module.empty()) {
    ref = machine_.registry().resolve_for(function, comb, data);
  }
  auto fn = machine_.lookup(ref);
  Value result = lambda::to_value(machine_.run(*fn, comb, data));
  if (options_.check_purity) {
    if (!machine_.verify_purity({ref, comb, data})) {
      fail(ErrorCode::Internal, "purity check failed for " + fn->name());
    }
  }
  return ok(std::move(result));
}

WireResponse Gateway::handle_fast(const WireRequest& req, std::string module, std::string function) const {
  if (req.method != "GET" && req.method != "POST") method_not_allowed(req);
  CallArgs args = collect_args(req);
  if (module.empty() && args.module) module = *args.module;
  if (function.empty() && args.function) function = *args.function;
  if (!module.empty() && !machine_.registry().has_module(module)) {
    fail(ErrorCode::ModuleNotAvailable, "Module not available");
  }
  if (args.to_uri && req.method != "POST") {
    fail(ErrorCode::MethodNotAllowed, "posting to to_uri requires POST");
  }
  if (!args.to_uri && !args.fns) {
    fail(ErrorCode::BadRequest, "missing 'to_uri' (or 'fns' for a batched call)");
  }
  if (args.fns && !function.empty()) {
    fail(ErrorCode::BadRequest, "give either a function in the path or a 'fns' list, not both");
  }
  if (!args.fns && function.empty()) {
    fail(ErrorCode::BadRequest, "missing function");
  }
  std::optional<rest::ResourceUri> target;
  if (args.to_uri) {
    if (!rest::ResourceUri::is_valid(*args.to_uri)) {
      fail(ErrorCode::BadRequest, "'to_uri' must be a /rest/ resource URI");
    }
    target = rest::ResourceUri::parse(*args.to_uri);
  }
  const auto comb = combinator_of(args);

  Value data = Value::object();
  if (args.uri) {
    data = store_.get(rest::ResourceUri::parse(*args.uri));
  } else if (args.data) {
    data = std::move(*args.data);
  }
  data = resolver_.resolve(data);

  auto resolve = [&](const std::string& name) {
    lambda::FunctionRef ref{module, name};
    if (module.empty()) {
      ref = machine_.registry().resolve_for(name, comb, data);
    }
    return machine_.lookup(ref);
  };

  Value result;
  if (args.fns) {
    std::vector<std::pair<std::string, lambda::FunctionPtr>> fns;
    for (const auto& name : fn_names(*args.fns)) fns.emplace_back(name, resolve(name));
    result = machine_.run_batch(fns, comb, data);
  } else {
    result = lambda::to_value(machine_.run(*resolve(function), comb, data));
  }

  if (!target) {
    return ok(std::move(result));
  }
  store_.post(*target, std::move(result));
  return ok(Value{{"status", "success"}, {"to_uri", target->str()}});
}

WireResponse Gateway::handle_query(const WireRequest& req) const {
  if (req.method != "GET" && req.method != "POST") method_not_allowed(req);
  std::optional<std::string> text;
  for (const auto& [k, v] : req.params) {
    if (k == "q") {
      text = v;
      break;
    }
  }
  if (req.method == "POST" && !text) {
    if (is_form(req)) {
      for (const auto& [k, v] : url::parse_query(req.body, true)) {
        if (k == "q") text = v;
      }
    } else if (!url::trim(req.body).empty()) {
      Value body = parse_json(req.body);
      if (body.is_object() && body.contains("q")) text = as_text(body["q"], "q");
    }
  }
  if (!text) fail(ErrorCode::BadRequest, "missing query parameter 'q'");

  query::Expr expr = query::parse(*text);
  if (std::holds_alternative<query::PostTo>(expr.node) && req.method != "POST") {
    fail(ErrorCode::MethodNotAllowed, "Post queries require POST");
  }
  return ok(query::Evaluator(store_, machine_).evaluate(expr));
}

}  // namespace fast::gateway

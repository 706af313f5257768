#include "fast/lambda_machine.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "fast/error.hpp"

namespace fast::lambda {

FunctionPtr make_function(std::string name, std::vector<std::string> params, Function::Body body) {
  return std::make_shared<const Function>(std::move(name), std::move(params), std::move(body));
}

Value to_value(Result r) {
  if (auto* fn = std::get_if<FunctionPtr>(&r)) {
    fail(ErrorCode::UnserializableResult,
         "result is a function value (" + (*fn)->name() + ") and cannot be serialized");
  }
  return std::get<Value>(std::move(r));
}

std::optional<Combinator> parse_combinator(std::string_view text) noexcept {
  if (text == "apply") return Combinator::Apply;
  if (text == "map") return Combinator::Map;
  if (text == "reduce") return Combinator::Reduce;
  if (text == "filter") return Combinator::Filter;
  return std::nullopt;
}

std::string_view to_string(Combinator c) noexcept {
  switch (c) {
    case Combinator::Apply: return "apply";
    case Combinator::Map: return "map";
    case Combinator::Reduce: return "reduce";
    case Combinator::Filter: return "filter";
  }
  return "apply";
}

Package& Package::add(std::string function, std::vector<std::string> params, Function::Body body) {
  auto fn = make_function(name_ + "." + function, std::move(params), std::move(body));
  functions_.insert_or_assign(std::move(function), std::move(fn));
  return *this;
}

void Registry::register_package(Package package) {
  if (packages_.contains(package.name())) {
    fail(ErrorCode::DuplicatePackage, "package '" + package.name() + "' is already registered");
  }
  std::string name = package.name();
  packages_.emplace(std::move(name), std::move(package));
}

void Registry::add_alias(std::string alias, std::string module) {
  if (packages_.contains(alias) || aliases_.contains(alias)) {
    fail(ErrorCode::DuplicatePackage, "package '" + alias + "' is already registered");
  }
  aliases_.insert_or_assign(std::move(alias), std::move(module));
}

std::string Registry::canonical_module(std::string_view module) const {
  auto it = aliases_.find(module);
  return it == aliases_.end() ? std::string(module) : it->second;
}

FunctionPtr Registry::lookup(const FunctionRef& ref) const {
  auto pkg = packages_.find(canonical_module(ref.module));
  if (pkg == packages_.end()) {
    fail(ErrorCode::ModuleNotAvailable, "Module not available");
  }
  auto fn = pkg->second.functions().find(ref.function);
  if (fn == pkg->second.functions().end()) {
    fail(ErrorCode::FunctionNotFound, "Function not found");
  }
  return fn->second;
}

std::vector<FunctionRef> Registry::find(std::string_view name) const {
  std::vector<FunctionRef> out;
  for (const auto& [module, pkg] : packages_) {
    if (pkg.functions().contains(name)) {
      out.push_back({module, std::string(name)});
    }
  }
  return out;
}

FunctionRef Registry::resolve_unqualified(std::string_view name,
                                          const std::function<bool(const Function&)>& accepts) const {
  auto candidates = find(name);
  if (candidates.empty()) {
    fail(ErrorCode::FunctionNotFound, "Function not found");
  }
  if (candidates.size() == 1) {
    return candidates.front();
  }
  if (accepts) {
    std::erase_if(candidates, [&](const FunctionRef& ref) { return !accepts(*lookup(ref)); });
    if (candidates.size() == 1) {
      return candidates.front();
    }
  }
  std::string modules;
  for (const auto& ref : find(name)) {
    modules += (modules.empty() ? "" : ", ") + ref.module;
  }
  fail(ErrorCode::AmbiguousFunction,
       "function '" + std::string(name) + "' is ambiguous across packages: " + modules);
}

FunctionRef Registry::resolve_for(std::string_view name, Combinator comb, const Value& data) const {
  if ((comb == Combinator::Map || comb == Combinator::Filter) && data.is_array() && data.empty()) {
    auto candidates = find(name);
    if (!candidates.empty()) return candidates.front();
  }
  return resolve_unqualified(name, [&](const Function& fn) { return accepts(fn, comb, data); });
}

bool Registry::has_module(std::string_view module) const { return packages_.contains(canonical_module(module)); }

std::vector<std::string> Registry::modules() const {
  std::vector<std::string> out;
  for (const auto& [name, pkg] : packages_) out.push_back(name);
  return out;
}

std::vector<Value> bind(const Function& fn, const Value& payload) {
  const auto& params = fn.params();
  if (payload.is_array()) {
    if (payload.size() != params.size()) {
      fail(ErrorCode::ArityMismatch, fn.name() + " expects " + std::to_string(params.size()) +
                                         " arguments, got " + std::to_string(payload.size()));
    }
    return std::vector<Value>(payload.begin(), payload.end());
  }
  if (payload.is_object()) {
    for (const auto& [key, _] : payload.items()) {
      if (std::find(params.begin(), params.end(), key) == params.end()) {
        fail(ErrorCode::UnknownParameter, fn.name() + " has no parameter '" + key + "'");
      }
    }
    std::vector<Value> args;
    args.reserve(params.size());
    for (const auto& p : params) {
      auto it = payload.find(p);
      if (it == payload.end()) {
        fail(ErrorCode::ArityMismatch, fn.name() + " is missing argument '" + p + "'");
      }
      args.push_back(*it);
    }
    return args;
  }
  if (params.size() != 1) {
    fail(ErrorCode::ArityMismatch,
         fn.name() + " expects " + std::to_string(params.size()) + " arguments, got a single value");
  }
  return {payload};
}

bool accepts_payload(const Function& fn, const Value& payload) noexcept {
  const auto& params = fn.params();
  if (payload.is_array()) return payload.size() == params.size();
  if (payload.is_object()) {
    if (payload.size() != params.size()) return false;
    return std::all_of(params.begin(), params.end(), [&](const std::string& p) { return payload.contains(p); });
  }
  return params.size() == 1;
}

bool accepts(const Function& fn, Combinator comb, const Value& data) noexcept {
  switch (comb) {
    case Combinator::Apply:
      return accepts_payload(fn, data);
    case Combinator::Reduce:
      return fn.arity() == 2;
    case Combinator::Map:
    case Combinator::Filter:
      if (!data.is_array()) return false;
      return std::all_of(data.begin(), data.end(), [&](const Value& x) { return accepts_payload(fn, x); });
  }
  return false;
}

Result bind_and_call(const Function& fn, const Value& payload) {
  auto args = bind(fn, payload);
  Result r = fn.call(args);
  if (auto* v = std::get_if<Value>(&r)) {
    validate(*v);
  }
  return r;
}

namespace {

[[noreturn]] void rethrow_at(std::size_t index, const Error& e) {
  throw Error(e.code(), "element " + std::to_string(index) + ": " + e.what());
}

void require_array(const Value& data, Combinator comb) {
  if (!data.is_array()) {
    fail(ErrorCode::NotAnArray, std::string(to_string(comb)) + " requires an array of argument sets");
  }
}

}  // namespace

LambdaMachine::LambdaMachine(Registry registry, const rest::ResourceStore* store, MachineOptions options)
    : registry_(std::move(registry)), store_(store), options_(options) {
  options_.map_workers = std::max(1u, options_.map_workers);
}

Value LambdaMachine::fetch_source(const LambdaRequest& req) const {
  if (const auto* uri = std::get_if<rest::ResourceUri>(&req.source)) {
    if (store_ == nullptr) {
      fail(ErrorCode::NotFound, "Resource not found");
    }
    return store_->get(*uri);
  }
  return std::get<Value>(req.source);
}

Value LambdaMachine::invoke(const LambdaRequest& req) const {
  auto fn = registry_.lookup(req.fn);
  return to_value(run(*fn, req.combinator, fetch_source(req)));
}

Result LambdaMachine::run(const Function& fn, Combinator comb, const Value& data) const {
  switch (comb) {
    case Combinator::Apply:
      return bind_and_call(fn, data);
    case Combinator::Map:
      return map(fn, data, options_.map_workers);
    case Combinator::Reduce:
      return reduce(fn, data);
    case Combinator::Filter:
      return filter(fn, data);
  }
  fail(ErrorCode::BadRequest, "unknown combinator");
}

Value LambdaMachine::map(const Function& fn, const Value& data, unsigned workers) const {
  require_array(data, Combinator::Map);
  const std::size_t n = data.size();
  std::vector<Value> out(n);

  // Each chunk is contiguous and stops at its first failure, so the failure
  // of the lowest failing chunk is the lowest failing index overall.
  auto run_chunk = [&](std::size_t begin, std::size_t end, std::exception_ptr& error) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = to_value(bind_and_call(fn, data[i]));
      } catch (const Error& e) {
        try {
          rethrow_at(i, e);
        } catch (...) {
          error = std::current_exception();
        }
        return;
      }
    }
  };

  const std::size_t chunks = std::min<std::size_t>(std::max(1u, workers), n);
  if (chunks <= 1) {
    std::exception_ptr error;
    run_chunk(0, n, error);
    if (error) std::rethrow_exception(error);
    return Value(std::move(out));
  }

  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> threads;
    threads.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t begin = n * c / chunks;
      std::size_t end = n * (c + 1) / chunks;
      threads.emplace_back([&, begin, end, c] { run_chunk(begin, end, errors[c]); });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return Value(std::move(out));
}

Value LambdaMachine::reduce(const Function& fn, const Value& data) const {
  require_array(data, Combinator::Reduce);
  if (data.empty()) {
    fail(ErrorCode::EmptyReduce, "reduce over an empty array");
  }
  Value acc = data[0];
  for (std::size_t i = 1; i < data.size(); ++i) {
    try {
      acc = to_value(bind_and_call(fn, Value::array({acc, data[i]})));
    } catch (const Error& e) {
      rethrow_at(i, e);
    }
  }
  return acc;
}

Value LambdaMachine::filter(const Function& fn, const Value& data) const {
  require_array(data, Combinator::Filter);
  Value out = Value::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      Value keep = to_value(bind_and_call(fn, data[i]));
      if (!keep.is_boolean()) {
        fail(ErrorCode::DomainError, "filter predicate " + fn.name() + " must return a boolean");
      }
      if (keep.get<bool>()) out.push_back(data[i]);
    } catch (const Error& e) {
      rethrow_at(i, e);
    }
  }
  return out;
}

Value LambdaMachine::run_batch(std::span<const std::pair<std::string, FunctionPtr>> fns, Combinator comb,
                               const Value& data) const {
  if (fns.empty()) {
    fail(ErrorCode::BadRequest, "no functions given");
  }
  if (fns.size() > 1 && comb != Combinator::Apply && comb != Combinator::Map) {
    fail(ErrorCode::BadRequest, std::string(to_string(comb)) + " takes exactly one function");
  }
  if (comb == Combinator::Map) {
    require_array(data, comb);
    Value out = Value::array();
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(Value::object());
    for (const auto& [name, fn] : fns) {
      Value column = map(*fn, data, options_.map_workers);
      for (std::size_t i = 0; i < column.size(); ++i) out[i][name] = std::move(column[i]);
    }
    return out;
  }
  Value out = Value::object();
  for (const auto& [name, fn] : fns) {
    out[name] = to_value(run(*fn, comb, data));
  }
  return out;
}

bool LambdaMachine::verify_purity(const LambdaRequest& req) const {
  auto fn = registry_.lookup(req.fn);
  const Value input = fetch_source(req);
  std::string first = dump(to_value(run(*fn, req.combinator, input)));
  std::string second = dump(to_value(run(*fn, req.combinator, input)));
  return first == second;
}

}  // namespace fast::lambda

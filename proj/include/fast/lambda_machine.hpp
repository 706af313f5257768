#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fast/rest_machine.hpp"
#include "fast/value.hpp"

namespace fast::lambda {

class Function;
using FunctionPtr = std::shared_ptr<const Function>;

/// What a call produces: plain data, or a function value built by a
/// higher-order function. Function values never reach the wire.
using Result = std::variant<Value, FunctionPtr>;

/// A pure callable with declared parameter names. Registered package members
/// and runtime function values share this type.
class Function {
 public:
  using Body = std::function<Result(std::span<const Value>)>;

  Function(std::string name, std::vector<std::string> params, Body body)
      : name_(std::move(name)), params_(std::move(params)), body_(std::move(body)) {}

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& params() const noexcept { return params_; }
  std::size_t arity() const noexcept { return params_.size(); }

  /// Calls the body; `args` must already match arity.
  Result call(std::span<const Value> args) const { return body_(args); }

 private:
  std::string name_;
  std::vector<std::string> params_;
  Body body_;
};

FunctionPtr make_function(std::string name, std::vector<std::string> params, Function::Body body);

/// Unwraps a Result; UnserializableResult for a function value.
Value to_value(Result r);

enum class Combinator { Apply, Map, Reduce, Filter };

std::optional<Combinator> parse_combinator(std::string_view text) noexcept;
std::string_view to_string(Combinator c) noexcept;

struct FunctionRef {
  std::string module;
  std::string function;
  friend bool operator==(const FunctionRef&, const FunctionRef&) = default;
};

class Package {
 public:
  explicit Package(std::string name) : name_(std::move(name)) {}

  Package& add(std::string function, std::vector<std::string> params, Function::Body body);

  const std::string& name() const noexcept { return name_; }
  const std::map<std::string, FunctionPtr, std::less<>>& functions() const noexcept { return functions_; }

 private:
  std::string name_;
  std::map<std::string, FunctionPtr, std::less<>> functions_;
};

/// The closed set of exposed packages. Filled during startup, read-only
/// afterwards.
class Registry {
 public:
  /// DuplicatePackage if `package.name()` is already present.
  void register_package(Package package);

  /// ModuleNotAvailable / FunctionNotFound.
  FunctionPtr lookup(const FunctionRef& ref) const;

  /// All (module, function) pairs whose function is called `name`.
  std::vector<FunctionRef> find(std::string_view name) const;

  /// Resolves an unqualified name. With several candidates, keeps only those
  /// `accepts` admits; anything other than exactly one survivor is an error.
  FunctionRef resolve_unqualified(std::string_view name,
                                  const std::function<bool(const Function&)>& accepts = {}) const;

  /// resolve_unqualified filtered by `accepts(fn, comb, data)`. Map and
  /// filter over an empty array give [] whichever candidate is chosen, so
  /// there the first candidate is taken instead of reporting ambiguity.
  FunctionRef resolve_for(std::string_view name, Combinator comb, const Value& data) const;

  /// Another name for a registered module. Aliases are honoured by lookup
  /// and has_module but never produce extra candidates in find.
  void add_alias(std::string alias, std::string module);
  std::string canonical_module(std::string_view module) const;

  bool has_module(std::string_view module) const;
  std::vector<std::string> modules() const;

 private:
  std::map<std::string, Package, std::less<>> packages_;
  std::map<std::string, std::string, std::less<>> aliases_;
};

/// Binds a payload to the function's parameters: arrays positionally, objects
/// by name, any other value as the single positional argument.
std::vector<Value> bind(const Function& fn, const Value& payload);

/// True when `bind` would succeed for the payload shape.
bool accepts_payload(const Function& fn, const Value& payload) noexcept;

/// True when `fn` can be used with `comb` over `data` (shape check only).
bool accepts(const Function& fn, Combinator comb, const Value& data) noexcept;

Result bind_and_call(const Function& fn, const Value& payload);

struct LambdaRequest {
  FunctionRef fn;
  Combinator combinator = Combinator::Apply;
  /// Inline data, or a resource fetched from the REST machine before dispatch.
  std::variant<Value, rest::ResourceUri> source;
};

struct MachineOptions {
  /// Worker threads used by map; 1 evaluates sequentially.
  unsigned map_workers = 1;
};

/// Dispatches pure function calls. Thread-safe for concurrent use once the
/// registry is built; never writes to the store.
class LambdaMachine {
 public:
  LambdaMachine(Registry registry, const rest::ResourceStore* store = nullptr, MachineOptions options = {});

  const Registry& registry() const noexcept { return registry_; }
  const MachineOptions& options() const noexcept { return options_; }

  FunctionPtr lookup(const FunctionRef& ref) const { return registry_.lookup(ref); }

  /// Fetches the source, dispatches the combinator and returns wire data.
  Value invoke(const LambdaRequest& req) const;

  /// Core combinator dispatch over already-resolved data. Apply may return a
  /// function value; the other combinators always return data.
  Result run(const Function& fn, Combinator comb, const Value& data) const;

  /// Several functions over the same data. Apply yields one object keyed by
  /// function name; map yields an array of such objects, one per element.
  /// Output is keyed even for a single function. Only apply and map accept
  /// more than one function.
  Value run_batch(std::span<const std::pair<std::string, FunctionPtr>> fns, Combinator comb,
                  const Value& data) const;

  Value map(const Function& fn, const Value& data, unsigned workers) const;

  /// Evaluates the request twice against one snapshot of its input and
  /// compares serialized results byte for byte.
  bool verify_purity(const LambdaRequest& req) const;

  Value fetch_source(const LambdaRequest& req) const;

 private:
  Value reduce(const Function& fn, const Value& data) const;
  Value filter(const Function& fn, const Value& data) const;

  Registry registry_;
  const rest::ResourceStore* store_;
  MachineOptions options_;
};

}  // namespace fast::lambda

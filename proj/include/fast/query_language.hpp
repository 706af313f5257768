#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fast/lambda_machine.hpp"
#include "fast/rest_machine.hpp"
#include "fast/value.hpp"

/// The FAST query language.
///
///   query      := [verb] expr [ "to" URI ]
///   verb       := "Get" | "Post"                  (Post requires "to")
///   expr       := combExpr | simpleCall | operand
///   simpleCall := NAME "for" binding ("and" binding)*
///   binding    := NAME "=" literal
///   combExpr   := COMB fnList ["from" NAME] "on" operand
///   COMB       := "Apply" | "Map" | "Reduce" | "Filter"
///   fnList     := fnItem ("," fnItem)* | "[" fnItem ("," fnItem)* "]"
///   fnItem     := NAME | "(" expr ")"
///   operand    := NAME | URI | literal | combExpr | JSONVALUE
///   literal    := number | quoted string | "true" | "false" | "null"
///
/// Keywords are case-insensitive. A bare NAME operand is the resource
/// /rest/<NAME>.
namespace fast::query {

/// Heap-allocated member with value semantics, for recursive AST nodes.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const noexcept { return *ptr_; }
  const T* operator->() const noexcept { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a == *b; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Expr;

struct Literal {
  Value value;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct ResourceRef {
  std::string uri;  // full /rest/... path
  friend bool operator==(const ResourceRef&, const ResourceRef&) = default;
};

struct SimpleCall {
  std::string function;
  std::vector<std::pair<std::string, Value>> bindings;
  friend bool operator==(const SimpleCall&, const SimpleCall&) = default;
};

/// A function name, or a parenthesized expression yielding a function value.
using FnItem = std::variant<std::string, Box<Expr>>;

struct CombExpr {
  lambda::Combinator comb;
  std::vector<FnItem> fns;
  std::optional<std::string> module;
  Box<Expr> operand;
  friend bool operator==(const CombExpr&, const CombExpr&) = default;
};

struct PostTo {
  Box<Expr> inner;
  std::string target;
  friend bool operator==(const PostTo&, const PostTo&) = default;
};

struct Expr {
  std::variant<Literal, ResourceRef, SimpleCall, CombExpr, PostTo> node;
  friend bool operator==(const Expr&, const Expr&) = default;
};

/// Throws fast::ParseError carrying the byte position and expected tokens.
Expr parse(std::string_view text);

/// Canonical text; parse(print(e)) == e for every well-formed AST.
std::string print(const Expr& e);

bool is_keyword(std::string_view word) noexcept;

/// Evaluates queries against the two machines. Only PostTo writes.
class Evaluator {
 public:
  Evaluator(rest::ResourceStore& store, const lambda::LambdaMachine& machine)
      : store_(store), machine_(machine) {}

  /// UnserializableResult when the result is a function value.
  Value evaluate(const Expr& e) const;

 private:
  lambda::Result eval(const Expr& e, const std::optional<std::string>& scope) const;
  lambda::Result eval_comb(const CombExpr& c, const std::optional<std::string>& scope) const;
  lambda::FunctionPtr resolve_name(const std::string& name, const std::optional<std::string>& module,
                                   const std::function<bool(const lambda::Function&)>& accepts) const;

  /// The enclosing `from` module, when it provides `name`.
  std::optional<std::string> inherited_module(const std::string& name,
                                              const std::optional<std::string>& scope) const;

  rest::ResourceStore& store_;
  const lambda::LambdaMachine& machine_;
};

}  // namespace fast::query

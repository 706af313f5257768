#include "fast/query_language.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>

#include "fast/error.hpp"

namespace fast::query {

namespace {

constexpr std::array<std::string_view, 14> kKeywords = {
    "get", "post", "to", "for", "and", "from", "on", "apply", "map", "reduce", "filter", "true", "false", "null",
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool ident_start(char c) noexcept { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) noexcept { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool uri_char(char c) noexcept {
  return !std::isspace(static_cast<unsigned char>(c)) && c != ',' && c != ')' && c != ']' && c != '(' && c != '[';
}

std::optional<lambda::Combinator> comb_keyword(std::string_view word) {
  auto w = lower(word);
  if (w == "apply") return lambda::Combinator::Apply;
  if (w == "map") return lambda::Combinator::Map;
  if (w == "reduce") return lambda::Combinator::Reduce;
  if (w == "filter") return lambda::Combinator::Filter;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_query() {
    skip_ws();
    if (pos_ == text_.size()) error({"query"});
    enum class Verb { None, Get, Post } verb = Verb::None;
    if (accept_keyword("get")) {
      verb = Verb::Get;
    } else if (accept_keyword("post")) {
      verb = Verb::Post;
    }
    Expr e = parse_expr();
    std::size_t to_pos = (skip_ws(), pos_);
    if (accept_keyword("to")) {
      if (verb != Verb::Post) {
        throw ParseError("parse error at position " + std::to_string(to_pos) + ": 'to' requires a Post query",
                         to_pos);
      }
      std::string target = parse_uri();
      e = Expr{PostTo{std::move(e), std::move(target)}};
    } else if (verb == Verb::Post) {
      error({"to"});
    }
    skip_ws();
    if (pos_ != text_.size()) error({"end of input"});
    return e;
  }

 private:
  [[noreturn]] void error(std::initializer_list<std::string_view> expected) {
    skip_ws();
    std::string msg = "parse error at position " + std::to_string(pos_) + ": expected ";
    bool first = true;
    for (auto tok : expected) {
      msg += (first ? "" : " | ");
      msg += tok;
      first = false;
    }
    msg += pos_ < text_.size() ? ", found '" + std::string(text_.substr(pos_, 12)) + "'" : ", found end of input";
    throw ParseError(msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek_char() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept_char(char c) {
    if (peek_char() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_char(char c) {
    if (!accept_char(c)) error({std::string_view(&c, 1)});
  }

  std::string_view peek_word() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) return {};
    std::size_t end = pos_;
    while (end < text_.size() && ident_char(text_[end])) ++end;
    return text_.substr(pos_, end - pos_);
  }

  bool peek_keyword(std::string_view kw) { return lower(peek_word()) == kw; }

  bool accept_keyword(std::string_view kw) {
    auto word = peek_word();
    if (!word.empty() && lower(word) == kw) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  std::string parse_name() {
    auto word = peek_word();
    if (word.empty() || is_keyword(word)) error({"NAME"});
    pos_ += word.size();
    return std::string(word);
  }

  std::string parse_uri() {
    if (peek_char() != '/') error({"URI"});
    std::size_t start = pos_;
    while (pos_ < text_.size() && uri_char(text_[pos_])) ++pos_;
    std::string uri(text_.substr(start, pos_ - start));
    if (!rest::ResourceUri::is_valid(uri)) {
      throw ParseError("invalid resource URI '" + uri + "' at position " + std::to_string(start), start);
    }
    return uri;
  }

  /// Position after a JSON number at `pos_`, or pos_ if none.
  std::size_t scan_number() const {
    std::size_t i = pos_;
    auto digits = [&] {
      std::size_t s = i;
      while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
      return i > s;
    };
    if (i < text_.size() && text_[i] == '-') ++i;
    if (!digits()) return pos_;
    if (i < text_.size() && text_[i] == '.') {
      ++i;
      if (!digits()) return pos_;
    }
    if (i < text_.size() && (text_[i] == 'e' || text_[i] == 'E')) {
      std::size_t save = i++;
      if (i < text_.size() && (text_[i] == '+' || text_[i] == '-')) ++i;
      if (!digits()) i = save;
    }
    return i;
  }

  std::optional<Value> accept_literal() {
    char c = peek_char();
    if (c == '"') {
      std::size_t start = pos_++;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      if (pos_ >= text_.size()) {
        throw ParseError("unterminated string starting at position " + std::to_string(start), start);
      }
      ++pos_;
      return json_at(start, pos_);
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t end = scan_number();
      if (end == pos_) error({"number"});
      std::size_t start = std::exchange(pos_, end);
      return json_at(start, end);
    }
    if (accept_keyword("true")) return Value(true);
    if (accept_keyword("false")) return Value(false);
    if (accept_keyword("null")) return Value(nullptr);
    return std::nullopt;
  }

  Value json_at(std::size_t start, std::size_t end) {
    auto v = Value::parse(text_.substr(start, end - start), nullptr, /*allow_exceptions=*/false);
    if (v.is_discarded()) {
      throw ParseError("invalid JSON value at position " + std::to_string(start), start);
    }
    try {
      validate(v);
    } catch (const Error& e) {
      throw ParseError(std::string(e.what()) + " at position " + std::to_string(start), start);
    }
    return canonical(std::move(v));
  }

  /// A bracketed JSON value starting at '[' or '{'.
  Value parse_json_value() {
    std::size_t start = pos_;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = pos_; i < text_.size(); ++i) {
      char c = text_[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '[' || c == '{') ++depth;
      else if (c == ']' || c == '}') {
        if (--depth == 0) {
          pos_ = i + 1;
          return json_at(start, pos_);
        }
      }
    }
    throw ParseError("unterminated JSON value starting at position " + std::to_string(start), start);
  }

  Expr parse_expr() {
    auto word = peek_word();
    if (!word.empty() && comb_keyword(word)) return parse_comb();
    if (!word.empty() && !is_keyword(word)) {
      std::size_t save = pos_;
      pos_ += word.size();
      if (accept_keyword("for")) {
        return parse_simple_call(std::string(word));
      }
      pos_ = save;
    }
    return parse_operand();
  }

  Expr parse_simple_call(std::string function) {
    SimpleCall call{std::move(function), {}};
    do {
      std::size_t at = (skip_ws(), pos_);
      std::string name = parse_name();
      expect_char('=');
      auto value = accept_literal();
      if (!value) error({"literal"});
      for (const auto& [existing, _] : call.bindings) {
        if (existing == name) throw ParseError("duplicate binding '" + name + "' at position " + std::to_string(at), at);
      }
      call.bindings.emplace_back(std::move(name), std::move(*value));
    } while (accept_keyword("and"));
    return Expr{std::move(call)};
  }

  Expr parse_operand() {
    auto word = peek_word();
    if (!word.empty()) {
      if (comb_keyword(word)) return parse_comb();
      if (!is_keyword(word)) {
        pos_ += word.size();
        return Expr{ResourceRef{"/rest/" + std::string(word)}};
      }
    }
    char c = peek_char();
    if (c == '[' || c == '{') return Expr{Literal{parse_json_value()}};
    if (c == '/') return Expr{ResourceRef{parse_uri()}};
    if (auto lit = accept_literal()) return Expr{Literal{std::move(*lit)}};
    error({"NAME", "URI", "literal", "JSON value", "Apply", "Map", "Reduce", "Filter"});
  }

  FnItem parse_fn_item() {
    if (accept_char('(')) {
      Expr inner = parse_expr();
      expect_char(')');
      return FnItem{Box<Expr>(std::move(inner))};
    }
    auto word = peek_word();
    if (word.empty() || is_keyword(word)) error({"function name", "("});
    pos_ += word.size();
    return FnItem{std::string(word)};
  }

  Expr parse_comb() {
    skip_ws();
    auto word = peek_word();
    auto comb = *comb_keyword(word);
    pos_ += word.size();

    std::vector<FnItem> fns;
    std::size_t second_pos = 0;
    auto items = [&] {
      do {
        if (fns.size() == 1) second_pos = (skip_ws(), pos_);
        fns.push_back(parse_fn_item());
      } while (accept_char(','));
    };
    if (accept_char('[')) {
      items();
      expect_char(']');
    } else {
      items();
    }
    if (fns.size() > 1 && comb != lambda::Combinator::Apply && comb != lambda::Combinator::Map) {
      throw ParseError("parse error at position " + std::to_string(second_pos) + ": " +
                           std::string(lambda::to_string(comb)) + " takes exactly one function",
                       second_pos);
    }
    std::optional<std::string> module;
    if (accept_keyword("from")) module = parse_name();
    if (!accept_keyword("on")) {
      if (module) error({"on"});
      error({",", "from", "on"});
    }
    Expr operand = parse_operand();
    return Expr{CombExpr{comb, std::move(fns), std::move(module), Box<Expr>(std::move(operand))}};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string comb_word(lambda::Combinator c) {
  switch (c) {
    case lambda::Combinator::Apply: return "Apply";
    case lambda::Combinator::Map: return "Map";
    case lambda::Combinator::Reduce: return "Reduce";
    case lambda::Combinator::Filter: return "Filter";
  }
  return "Apply";
}

bool is_plain_name(std::string_view s) {
  return !s.empty() && ident_start(s[0]) && std::all_of(s.begin(), s.end(), ident_char) && !is_keyword(s);
}

void print_to(const Expr& e, std::string& out);

void print_fn_item(const FnItem& item, std::string& out) {
  if (const auto* name = std::get_if<std::string>(&item)) {
    out += *name;
  } else {
    out += '(';
    print_to(*std::get<Box<Expr>>(item), out);
    out += ')';
  }
}

void print_to(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Literal>) {
          out += dump(node.value);
        } else if constexpr (std::is_same_v<T, ResourceRef>) {
          std::string_view uri = node.uri;
          std::string_view tail = uri.substr(std::min<std::size_t>(6, uri.size()));
          out += (uri.starts_with("/rest/") && is_plain_name(tail)) ? std::string(tail) : node.uri;
        } else if constexpr (std::is_same_v<T, SimpleCall>) {
          out += node.function + " for ";
          for (std::size_t i = 0; i < node.bindings.size(); ++i) {
            if (i) out += " and ";
            out += node.bindings[i].first + "=" + dump(node.bindings[i].second);
          }
        } else if constexpr (std::is_same_v<T, CombExpr>) {
          out += comb_word(node.comb) + " ";
          for (std::size_t i = 0; i < node.fns.size(); ++i) {
            if (i) out += ", ";
            print_fn_item(node.fns[i], out);
          }
          if (node.module) out += " from " + *node.module;
          out += " on ";
          print_to(*node.operand, out);
        } else {
          out += "Post ";
          print_to(*node.inner, out);
          out += " to " + node.target;
        }
      },
      e.node);
}

std::string item_key(const FnItem& item) {
  std::string out;
  print_fn_item(item, out);
  return out;
}

}  // namespace

bool is_keyword(std::string_view word) noexcept {
  std::string w;
  for (char c : word) w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return std::find(kKeywords.begin(), kKeywords.end(), w) != kKeywords.end();
}

Expr parse(std::string_view text) { return Parser(text).parse_query(); }

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

Value Evaluator::evaluate(const Expr& e) const { return lambda::to_value(eval(e, std::nullopt)); }

lambda::FunctionPtr Evaluator::resolve_name(const std::string& name, const std::optional<std::string>& module,
                                            const std::function<bool(const lambda::Function&)>& accepts) const {
  if (module) {
    return machine_.lookup({*module, name});
  }
  return machine_.lookup(machine_.registry().resolve_unqualified(name, accepts));
}

std::optional<std::string> Evaluator::inherited_module(const std::string& name,
                                                    const std::optional<std::string>& scope) const {
  if (!scope) return std::nullopt;
  const std::string module = machine_.registry().canonical_module(*scope);
  for (const auto& ref : machine_.registry().find(name)) {
    if (ref.module == module) return scope;
  }
  return std::nullopt;
}

lambda::Result Evaluator::eval(const Expr& e, const std::optional<std::string>& scope) const {
  return std::visit(
      [&](const auto& node) -> lambda::Result {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return node.value;
        } else if constexpr (std::is_same_v<T, ResourceRef>) {
          return store_.get(rest::ResourceUri::parse(node.uri));
        } else if constexpr (std::is_same_v<T, SimpleCall>) {
          Value args = Value::object();
          for (const auto& [k, v] : node.bindings) args[k] = v;
          auto module = inherited_module(node.function, scope);
          auto fn = resolve_name(node.function, module,
                                 [&](const lambda::Function& f) { return lambda::accepts_payload(f, args); });
          return machine_.run(*fn, lambda::Combinator::Apply, args);
        } else if constexpr (std::is_same_v<T, CombExpr>) {
          return eval_comb(node, scope);
        } else {
          Value result = lambda::to_value(eval(*node.inner, scope));
          return store_.post(rest::ResourceUri::parse(node.target), std::move(result));
        }
      },
      e.node);
}

lambda::Result Evaluator::eval_comb(const CombExpr& c, const std::optional<std::string>& scope) const {
  Value data = lambda::to_value(eval(*c.operand, std::nullopt));
  // a `from` clause also scopes names inside parenthesized function items
  const std::optional<std::string>& inner_scope = c.module ? c.module : scope;

  std::vector<std::pair<std::string, lambda::FunctionPtr>> fns;
  for (const auto& item : c.fns) {
    if (const auto* name = std::get_if<std::string>(&item)) {
      auto module = c.module ? c.module : inherited_module(*name, scope);
      fns.emplace_back(*name, module ? machine_.lookup({*module, *name})
                                     : machine_.lookup(machine_.registry().resolve_for(*name, c.comb, data)));
    } else {
      lambda::Result r = eval(*std::get<Box<Expr>>(item), inner_scope);
      auto* fn = std::get_if<lambda::FunctionPtr>(&r);
      if (fn == nullptr) {
        fail(ErrorCode::DomainError, "function item " + item_key(item) + " did not evaluate to a function");
      }
      fns.emplace_back(item_key(item), *fn);
    }
  }
  if (fns.size() == 1) {
    return machine_.run(*fns.front().second, c.comb, data);
  }
  return machine_.run_batch(fns, c.comb, data);
}

}  // namespace fast::query

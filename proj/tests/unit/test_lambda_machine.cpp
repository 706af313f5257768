#include <doctest.h>

#include <string>

#include "fast/builtin_packages.hpp"
#include "fast/error.hpp"
#include "fast/lambda_machine.hpp"
#include "fast/rest_machine.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace fast;
using lambda::Combinator;
using lambda::LambdaMachine;
using lambda::LambdaRequest;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

LambdaRequest req(std::string module, std::string fn, Combinator c, Value data) {
  return {{std::move(module), std::move(fn)}, c, std::move(data)};
}

}  // namespace

TEST_CASE("register and lookup") {
  auto reg = packages::make_registry();
  CHECK(reg.lookup({"pricer", "price"})->params() == std::vector<std::string>{"strike", "time", "spot", "vol"});
  CHECK(reg.lookup({"option_pricer", "price"}) == reg.lookup({"pricer", "price"}));
  CHECK(code_of([&] { reg.lookup({"nope", "f"}); }) == ErrorCode::ModuleNotAvailable);
  CHECK(code_of([&] { reg.lookup({"pricer", "nope"}); }) == ErrorCode::FunctionNotFound);
  CHECK(code_of([&] { reg.register_package(packages::pricer()); }) == ErrorCode::DuplicatePackage);
  CHECK(reg.find("price").size() == 1);
  CHECK(reg.find("add").size() == 2);
}

TEST_CASE("unqualified resolution") {
  auto reg = packages::make_registry();
  CHECK(reg.resolve_unqualified("price") == lambda::FunctionRef{"pricer", "price"});
  CHECK(code_of([&] { reg.resolve_unqualified("add"); }) == ErrorCode::AmbiguousFunction);
  CHECK(code_of([&] { reg.resolve_unqualified("nothing"); }) == ErrorCode::FunctionNotFound);
  auto binary = [](const lambda::Function& f) { return f.arity() == 2; };
  CHECK(reg.resolve_unqualified("add", binary) == lambda::FunctionRef{"basic_arithmetic", "add"});
}

TEST_CASE("bind_and_call") {
  auto reg = packages::make_registry();
  auto add = reg.lookup({"basic_arithmetic", "add"});
  CHECK(lambda::to_value(lambda::bind_and_call(*add, Value::array({2, 3}))) == 5);
  CHECK(lambda::to_value(lambda::bind_and_call(*add, Value{{"a", 2}, {"b", 3}})) == 5);
  CHECK(code_of([&] { lambda::bind_and_call(*add, Value::array({1, 2, 3})); }) == ErrorCode::ArityMismatch);
  CHECK(code_of([&] { lambda::bind_and_call(*add, Value{{"a", 1}}); }) == ErrorCode::ArityMismatch);
  CHECK(code_of([&] { lambda::bind_and_call(*add, Value{{"a", 1}, {"c", 2}}); }) == ErrorCode::UnknownParameter);
  auto divide = reg.lookup({"basic_arithmetic", "divide"});
  CHECK(code_of([&] { lambda::bind_and_call(*divide, Value::array({1, 0})); }) == ErrorCode::DomainError);

  auto price = reg.lookup({"pricer", "price"});
  double p = lambda::to_value(lambda::bind_and_call(
                                  *price, Value{{"strike", 100}, {"time", 1}, {"spot", 20}, {"vol", 0.2}}))
                 .get<double>();
  CHECK(p >= 0.0);
  CHECK(p < 1e-12);
}

TEST_CASE("higher-order results") {
  auto reg = packages::make_registry();
  auto add = reg.lookup({"higher_order_arithmetic", "add"});
  auto r = lambda::bind_and_call(*add, 2);
  REQUIRE(std::holds_alternative<lambda::FunctionPtr>(r));
  auto f = std::get<lambda::FunctionPtr>(r);
  CHECK(lambda::to_value(lambda::bind_and_call(*f, 3)) == 5);
  CHECK(code_of([&] { lambda::to_value(r); }) == ErrorCode::UnserializableResult);
}

TEST_CASE("invoke combinators") {
  LambdaMachine m(packages::make_registry());
  CHECK(m.invoke(req("basic_arithmetic", "add", Combinator::Reduce, Value::array({1, 2, 3, 4}))) == 10);
  CHECK(m.invoke(req("basic_arithmetic", "add", Combinator::Reduce, Value::array({7}))) == 7);
  CHECK(m.invoke(req("basic_arithmetic", "add", Combinator::Map, Value::array())) == Value::array());
  CHECK(m.invoke(req("basic_arithmetic", "is_positive", Combinator::Filter,
                     Value::parse("[[1],[-2],[3]]"))) == Value::parse("[[1],[3]]"));
  CHECK(m.invoke(req("basic_arithmetic", "add", Combinator::Map, Value::parse("[[1,2],{\"a\":3,\"b\":4}]"))) ==
        Value::array({3, 7}));

  CHECK(code_of([&] { m.invoke(req("basic_arithmetic", "add", Combinator::Reduce, Value::array())); }) ==
        ErrorCode::EmptyReduce);
  CHECK(code_of([&] { m.invoke(req("basic_arithmetic", "add", Combinator::Map, Value{{"a", 1}})); }) ==
        ErrorCode::NotAnArray);
  CHECK(code_of([&] { m.invoke(req("basic_arithmetic", "add", Combinator::Filter, 3)); }) ==
        ErrorCode::NotAnArray);
  // predicate must answer a boolean
  CHECK(code_of([&] { m.invoke(req("basic_arithmetic", "add", Combinator::Filter, Value::parse("[[1,2]]"))); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("map fails fast and reports the element index") {
  LambdaMachine m(packages::make_registry(), nullptr, {4});
  Value data = Value::parse("[[1,1],[2,1],[3,0],[4,1],[5,0]]");
  try {
    m.invoke(req("basic_arithmetic", "divide", Combinator::Map, data));
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
    CHECK(std::string(e.what()).rfind("element 2:", 0) == 0);
  }
}

TEST_CASE("data from the store") {
  rest::ResourceStore store;
  store.post(rest::ResourceUri::parse("/rest/xs"), Value::array({1, 2, 3}));
  LambdaMachine m(packages::make_registry(), &store);
  LambdaRequest r{{"basic_arithmetic", "add"}, Combinator::Reduce, rest::ResourceUri::parse("/rest/xs")};
  CHECK(m.invoke(r) == 6);
  LambdaRequest missing{{"basic_arithmetic", "add"}, Combinator::Reduce, rest::ResourceUri::parse("/rest/none")};
  CHECK(code_of([&] { m.invoke(missing); }) == ErrorCode::NotFound);
  CHECK(m.verify_purity(r));
}

TEST_CASE("combinator oracle on random arrays") {
  testing::Gen gen(3);
  LambdaMachine m1(packages::make_registry(), nullptr, {1});
  LambdaMachine m4(packages::make_registry(), nullptr, {4});
  auto add = m1.lookup({"basic_arithmetic", "add"});
  auto mul = m1.lookup({"basic_arithmetic", "multiply"});
  auto pos = m1.lookup({"basic_arithmetic", "is_positive"});
  for (int i = 0; i < 500; ++i) {
    std::vector<double> xs;
    Value arr = Value::array(), pairs = Value::array();
    for (int n = gen.integer(0, 6); n > 0; --n) {
      Value x = gen.number();
      xs.push_back(x.get<double>());
      arr.push_back(x);
      pairs.push_back(Value::array({x, x}));
    }
    Value mapped = m1.map(*mul, pairs, 1);
    REQUIRE(mapped.size() == xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) CHECK(mapped[k].get<double>() == xs[k] * xs[k]);
    CHECK(dump(m4.map(*mul, pairs, 4)) == dump(mapped));

    Value kept = lambda::to_value(m1.run(*pos, Combinator::Filter, arr));
    Value expect = Value::array();
    for (std::size_t k = 0; k < xs.size(); ++k)
      if (xs[k] > 0) expect.push_back(arr[k]);
    CHECK(kept == expect);

    auto folded = testing::fold_left(xs, [](double a, double b) { return a + b; });
    if (folded) {
      CHECK(lambda::to_value(m1.run(*add, Combinator::Reduce, arr)).get<double>() == *folded);
    } else {
      CHECK(code_of([&] { m1.run(*add, Combinator::Reduce, arr); }) == ErrorCode::EmptyReduce);
    }
  }
}

TEST_CASE("run_batch keys by function name") {
  LambdaMachine m(packages::make_registry());
  std::vector<std::pair<std::string, lambda::FunctionPtr>> fns = {
      {"add", m.lookup({"basic_arithmetic", "add"})}, {"multiply", m.lookup({"basic_arithmetic", "multiply"})}};
  CHECK(m.run_batch(fns, Combinator::Apply, Value::array({2, 3})) == Value{{"add", 5}, {"multiply", 6}});
  CHECK(m.run_batch(fns, Combinator::Map, Value::parse("[[1,2],[3,4]]")) ==
        Value::parse(R"([{"add":3,"multiply":2},{"add":7,"multiply":12}])"));
  CHECK(code_of([&] { m.run_batch(fns, Combinator::Reduce, Value::array({1, 2})); }) == ErrorCode::BadRequest);
}

TEST_CASE("combinator names") {
  CHECK(lambda::parse_combinator("map") == Combinator::Map);
  CHECK(lambda::parse_combinator("reduce") == Combinator::Reduce);
  CHECK_FALSE(lambda::parse_combinator("fold").has_value());
  CHECK(lambda::to_string(Combinator::Filter) == "filter");
}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "fast/error.hpp"
#include "fast/value.hpp"
#include "support/generators.hpp"

using namespace fast;

TEST_CASE("canonical numbers") {
  CHECK(dump(number(5.0)) == "5");
  CHECK(dump(number(2.5)) == "2.5");
  CHECK(dump(number(-0.0)) == "0");
  CHECK(dump(canonical(Value::parse("[1.0, {\"a\": 3.0}]"))) == "[1,{\"a\":3}]");
  // beyond 2^53 stays floating point
  CHECK(canonical(Value(1e300)).is_number_float());
  CHECK_THROWS_AS(number(std::numeric_limits<double>::infinity()), Error);
  CHECK_THROWS_AS(number(std::nan("")), Error);
}

TEST_CASE("parse_json validates") {
  CHECK(parse_json("{\"x\": 1}") == Value{{"x", 1}});
  CHECK_THROWS_AS(parse_json("{"), Error);

  std::string deep(64, '[');
  deep += std::string(64, ']');
  CHECK_NOTHROW(parse_json(deep));
  std::string too_deep(65, '[');
  too_deep += std::string(65, ']');
  try {
    parse_json(too_deep);
    FAIL("expected InvalidValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidValue);
  }
}

TEST_CASE("parse_param falls back to the raw string") {
  CHECK(parse_param("35.05") == Value(35.05));
  CHECK(parse_param("true") == Value(true));
  CHECK(parse_param("\"q\"") == Value("q"));
  CHECK(parse_param("abc") == Value("abc"));
  CHECK(parse_param("[1,") == Value("[1,"));
}

TEST_CASE("serialization round trip is lossless") {
  testing::Gen gen(7);
  for (int i = 0; i < 300; ++i) {
    Value v = gen.value(3);
    Value back = parse_json(dump(v));
    CHECK(back == v);
    CHECK(dump(back) == dump(v));
  }
}

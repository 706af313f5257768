#pragma once

// The HTTP contract as an ordered table of request/expectation rows. Rows
// share one server, so earlier writes are visible to later rows.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fast/gateway.hpp"
#include "fast/value.hpp"

namespace fast::testing {

struct ContractRow {
  std::string label;
  gateway::WireRequest req;
  int status;
  std::function<bool(const Value&)> body_ok;
};

inline std::function<bool(const Value&)> exactly(Value expected) {
  return [expected = std::move(expected)](const Value& got) { return dump(got) == dump(expected); };
}

/// {"message": <text>} and nothing else.
inline std::function<bool(const Value&)> message(std::string text) {
  return [text = std::move(text)](const Value& got) {
    return got.is_object() && got.size() == 1 && got.contains("message") && got["message"] == text;
  };
}

/// {"message": <any string>}, optionally with a numeric "position".
inline std::function<bool(const Value&)> message_shape(bool with_position = false) {
  return [with_position](const Value& got) {
    if (!got.is_object() || !got.contains("message") || !got["message"].is_string()) return false;
    if (with_position) return got.size() == 2 && got.contains("position") && got["position"].is_number_unsigned();
    return got.size() == 1;
  };
}

inline gateway::WireRequest wire(std::string method, std::string path,
                                 std::vector<std::pair<std::string, std::string>> params = {},
                                 std::string body = "") {
  std::string type = body.empty() ? "" : "application/json";
  return {std::move(method), std::move(path), std::move(params), std::move(body), std::move(type)};
}

inline std::vector<ContractRow> contract_rows() {
  const Value success{{"status", "success"}};
  const Value trades = Value::parse("[[100,1,20,0.2],[100,1,100,0.2]]");
  std::vector<ContractRow> rows = {
      {"health", wire("GET", "/healthz"), 200, exactly(Value{{"status", "ok"}})},
      {"health wrong method", wire("POST", "/healthz", {}, "{}"), 405, message_shape()},
      {"unknown route", wire("GET", "/elsewhere"), 404, message("Not found")},

      {"rest post wrapped", wire("POST", "/rest/trades", {}, dump(Value{{"data", trades}})), 200, exactly(success)},
      {"rest get", wire("GET", "/rest/trades"), 200, exactly(trades)},
      {"rest get absent", wire("GET", "/rest/never-posted"), 404, message("Resource not found")},
      {"rest put bare object", wire("PUT", "/rest/mylocation", {}, R"({"lat":35.050456,"long":118.2509})"), 200,
       exactly(success)},
      {"rest get object", wire("GET", "/rest/mylocation"), 200,
       exactly(Value{{"lat", 35.050456}, {"long", 118.2509}})},
      {"rest children", wire("GET", "/rest/book", {{"children", ""}}), 200, exactly(Value::array())},
      {"rest post nested", wire("POST", "/rest/book/a", {}, "1"), 200, exactly(success)},
      {"rest children listed", wire("GET", "/rest/book", {{"children", ""}}), 200,
       exactly(Value::array({"/rest/book/a"}))},
      {"rest post empty body", wire("POST", "/rest/x"), 400, message_shape()},
      {"rest post malformed json", wire("POST", "/rest/x", {}, "{\"a\":"), 400, message_shape()},
      {"rest post non-finite", wire("POST", "/rest/x", {}, "[1e999]"), 400, message_shape()},
      {"rest post too large", wire("POST", "/rest/big", {}, "\"" + std::string(1 << 20, 'x') + "\""), 413,
       message_shape()},
      {"rest bad uri", wire("GET", "/rest/a//b"), 400, message_shape()},
      {"rest bare prefix", wire("GET", "/rest"), 400, message_shape()},
      {"rest wrong method", wire("PATCH", "/rest/trades", {}, "1"), 405, message_shape()},
      {"rest delete", wire("DELETE", "/rest/mylocation"), 200, exactly(success)},
      {"rest delete absent", wire("DELETE", "/rest/mylocation"), 404, message("Resource not found")},
      {"rest stored query", wire("POST", "/rest/total", {}, R"({"query":"Reduce add on [1,2,3]"})"), 200,
       exactly(success)},
      {"rest stored query value", wire("GET", "/rest/total"), 200, exactly(6)},
      {"rest stored query parse error", wire("POST", "/rest/total", {}, R"({"query":"Map price on"})"), 400,
       message_shape(true)},

      {"lambda module absent", wire("GET", "/lambda/nope/f"), 404, message("Module not available")},
      {"lambda function absent", wire("GET", "/lambda/pricer/nope"), 404, message("Function not found")},
      {"lambda query params", wire("GET", "/lambda/basic_arithmetic/add", {{"a", "2"}, {"b", "3"}}), 200, exactly(5)},
      {"lambda data positional", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"data":[2,3]})"), 200,
       exactly(5)},
      {"lambda bare body", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"a":2,"b":3})"), 200, exactly(5)},
      {"lambda data param", wire("GET", "/lambda/basic_arithmetic/add", {{"data", "[2,3]"}}), 200, exactly(5)},
      {"lambda malformed data param", wire("GET", "/lambda/basic_arithmetic/add", {{"data", "[2,"}}), 400,
       message_shape()},
      {"lambda arity", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"data":[1,2,3]})"), 422, message_shape()},
      {"lambda unknown parameter", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"data":{"a":1,"c":2}})"), 422,
       message_shape()},
      {"lambda domain error", wire("POST", "/lambda/basic_arithmetic/divide", {}, R"({"data":[1,0]})"), 500,
       message_shape()},
      {"lambda empty reduce", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"data":[],"to_do":"reduce"})"),
       500, message_shape()},
      {"lambda map non-array", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"data":{"a":1},"to_do":"map"})"),
       500, message_shape()},
      {"lambda unknown combinator", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"data":[1,2],"to_do":"fold"})"),
       400, message_shape()},
      {"lambda reduce", wire("POST", "/lambda/basic_arithmetic/add", {}, R"({"data":[1,2,3,4],"to_do":"reduce"})"),
       200, exactly(10)},
      {"lambda filter", wire("POST", "/lambda/basic_arithmetic/is_positive", {},
                             R"({"data":[[1],[-2],[3]],"to_do":"filter"})"),
       200, exactly(Value::parse("[[1],[3]]"))},
      {"lambda uri source", wire("POST", "/lambda/pricer/price", {}, R"({"uri":"/rest/trades","to_do":"map"})"), 200,
       [](const Value& v) { return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(); }},
      {"lambda uri absent", wire("POST", "/lambda/pricer/price", {}, R"({"uri":"/rest/none","to_do":"map"})"), 404,
       message("Resource not found")},
      {"lambda unserializable", wire("POST", "/lambda/higher_order_arithmetic/add", {}, R"({"data":[2]})"), 500,
       message_shape()},
      {"lambda unqualified", wire("GET", "/lambda/get_weather", {{"latitude", "35.05"}, {"longitude ", "118.25"}}),
       200, exactly(Value{{"temp_c", 27.13}})},
      {"lambda ambiguous", wire("POST", "/lambda/add", {}, R"({"data":{}})"), 400, message_shape()},
      {"lambda template rest", wire("POST", "/lambda/pricer/get_value", {},
                                    R"({"data":{"stock_portfolio":"{{/rest/trades}}"}})"),
       200, [](const Value& v) { return v.is_number() && v.get<double>() > 7.9; }},
      {"lambda template absent", wire("POST", "/lambda/pricer/get_value", {},
                                      R"({"data":{"stock_portfolio":"{{/rest/none}}"}})"),
       404, message("Resource not found")},
      {"lambda template malformed", wire("POST", "/lambda/pricer/get_value", {},
                                         R"({"data":{"stock_portfolio":"{{/rest/trades"}})"),
       400, message_shape()},
      {"lambda wrong method", wire("DELETE", "/lambda/basic_arithmetic/add"), 405, message_shape()},

      {"fast to_uri", wire("POST", "/fast/pricer/get_value", {},
                           R"({"data":{"stock_portfolio":"{{/rest/trades }}"},"to_uri":"/rest/book_value"})"),
       200, exactly(Value{{"status", "success"}, {"to_uri", "/rest/book_value"}})},
      {"fast stored value", wire("GET", "/rest/book_value"), 200,
       [](const Value& v) { return v.is_number() && v.get<double>() > 7.9; }},
      {"fast module/function in body", wire("POST", "/fast", {},
                                            R"({"module":"pricer","function":"get_value","to_uri":"/rest/bv2",
                                                "data":{"stock_portfolio":"{{/rest/trades}}"}})"),
       200, exactly(Value{{"status", "success"}, {"to_uri", "/rest/bv2"}})},
      {"fast to_uri over GET", wire("GET", "/fast/pricer/get_value", {{"to_uri", "/rest/x"}}), 405, message_shape()},
      {"fast batch", wire("POST", "/fast/pricer", {},
                          R"({"fns":["price","delta","gamma","vega"],
                              "data":{"strike":100,"time":1,"spot":20,"vol":0.2}})"),
       200,
       [](const Value& v) {
         return v.is_object() && v.size() == 4 && v.contains("price") && v.contains("delta") &&
                v.contains("gamma") && v.contains("vega");
       }},
      {"fast batch comma list", wire("GET", "/fast/basic_arithmetic", {{"fns", "add, multiply"}, {"data", "[2,3]"}}),
       200, exactly(Value{{"add", 5}, {"multiply", 6}})},
      {"fast nested lambda template",
       wire("GET", "/fast/pricer",
            {{"fns", R"(["price", "delta", "gamma", "vega"])"},
             {"data", R"({"strike":100, "time":1, "spot":20,
                          "vol": "{{/lambda/pricer/implied_vol?strike=100&time=1&spot =20&price=2}}"})"}}),
       200,
       [](const Value& v) {
         return v.is_object() && v.size() == 4 && v.contains("price") && v["price"].is_number() &&
                std::abs(v["price"].get<double>() - 2.0) < 1e-8;
       }},
      {"fast nothing to do", wire("POST", "/fast/pricer", {}, R"({"data":{}})"), 400, message_shape()},
      {"fast fns and path function", wire("POST", "/fast/pricer/price", {}, R"({"fns":["price"],"data":{}})"), 400,
       message_shape()},
      {"fast module absent", wire("POST", "/fast/nope/f", {}, R"({"to_uri":"/rest/x","data":{}})"), 404,
       message("Module not available")},
      {"fast bad to_uri", wire("POST", "/fast/basic_arithmetic/add", {}, R"({"to_uri":"/elsewhere","data":[1,2]})"),
       400, message_shape()},
      {"fast wrong method", wire("PUT", "/fast/pricer", {}, "{}"), 405, message_shape()},

      {"query higher order", wire("GET", "/query", {{"q", "Get Apply (Apply add on 2) from higher_order_arithmetic on 3"}}),
       200, exactly(5)},
      {"query body", wire("POST", "/query", {}, R"({"q":"Reduce add on Map [price] on trades"})"), 200,
       [](const Value& v) { return v.is_number() && v.get<double>() > 7.9; }},
      {"query parse error", wire("GET", "/query", {{"q", "Map price on"}}), 400, message_shape(true)},
      {"query missing", wire("GET", "/query"), 400, message_shape()},
      {"query post over GET", wire("GET", "/query", {{"q", "Post 1 to /rest/one"}}), 405, message_shape()},
      {"query post", wire("POST", "/query", {}, R"({"q":"Post 1 to /rest/one"})"), 200, exactly(success)},
      {"query reads post", wire("GET", "/rest/one"), 200, exactly(1)},
      {"query wrong method", wire("DELETE", "/query"), 405, message_shape()},
  };
  return rows;
}

}  // namespace fast::testing

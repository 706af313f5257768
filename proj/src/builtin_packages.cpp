#include "fast/builtin_packages.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fast/error.hpp"

namespace fast::packages {

namespace black_scholes {

namespace {

struct D {
  double d1;
  double d2;
  double root_t;
};

D terms(const OptionParams& p) {
  double root_t = std::sqrt(p.time);
  double sd = p.vol * root_t;
  double d1 = (std::log(p.spot / p.strike) + 0.5 * sd * sd) / sd;
  return {d1, d1 - sd, root_t};
}

void positive(double x, const char* name) {
  if (!std::isfinite(x) || x <= 0.0) {
    fail(ErrorCode::DomainError, std::string(name) + " must be a positive finite number");
  }
}

}  // namespace

void check(const OptionParams& p) {
  positive(p.strike, "strike");
  positive(p.time, "time");
  positive(p.spot, "spot");
  positive(p.vol, "vol");
  if (p.vol > 10.0) fail(ErrorCode::DomainError, "vol must not exceed 10");
  if (p.time > 100.0) fail(ErrorCode::DomainError, "time must not exceed 100");
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double price(const OptionParams& p) {
  check(p);
  auto [d1, d2, _] = terms(p);
  double v = p.spot * norm_cdf(d1) - p.strike * norm_cdf(d2);
  // rounding can push the deep out-of-the-money value a hair below the bounds
  return std::clamp(v, std::max(p.spot - p.strike, 0.0), p.spot);
}

double delta(const OptionParams& p) {
  check(p);
  return norm_cdf(terms(p).d1);
}

double gamma(const OptionParams& p) {
  check(p);
  auto t = terms(p);
  return norm_pdf(t.d1) / (p.spot * p.vol * t.root_t);
}

double vega(const OptionParams& p) {
  check(p);
  auto t = terms(p);
  return p.spot * norm_pdf(t.d1) * t.root_t;
}

double implied_vol(double strike, double time, double spot, double target) {
  constexpr double kLow = 1e-6;
  constexpr double kHigh = 10.0;
  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 200;

  check({strike, time, spot, 0.2});
  if (!std::isfinite(target) || !(target > std::max(spot - strike, 0.0)) || !(target < spot)) {
    fail(ErrorCode::NoSolution, "price is outside the no-arbitrage bounds (max(spot - strike, 0), spot)");
  }
  double lo = kLow;
  double hi = kHigh;
  if (price({strike, time, spot, hi}) < target || price({strike, time, spot, lo}) > target) {
    fail(ErrorCode::NoSolution, "no volatility in (1e-6, 10) reproduces the price");
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < kMaxIterations; ++i) {
    mid = 0.5 * (lo + hi);
    double diff = price({strike, time, spot, mid}) - target;
    if (std::fabs(diff) < kTolerance || mid == lo || mid == hi) break;
    (diff < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

}  // namespace black_scholes

double synthetic_temperature(double latitude, double longitude) {
  double t = 30.0 - std::fabs(latitude) / 3.0 + 10.0 * std::sin(longitude * std::numbers::pi / 180.0);
  return std::round(t * 100.0) / 100.0;
}

namespace {

using lambda::Package;
using lambda::Result;
namespace bs = black_scholes;

bs::OptionParams option_args(std::span<const Value> args) {
  return {as_double(args[0], "strike"), as_double(args[1], "time"), as_double(args[2], "spot"),
          as_double(args[3], "vol")};
}

template <double (*Greek)(const bs::OptionParams&)>
Result option_fn(std::span<const Value> args) {
  return number(Greek(option_args(args)));
}

const std::vector<std::string> kOptionParams = {"strike", "time", "spot", "vol"};

/// A position is [strike, time, spot, vol] or an object with those keys and
/// an optional "quantity" (default 1).
double position_value(const Value& pos) {
  if (pos.is_array()) {
    if (pos.size() != 4) fail(ErrorCode::DomainError, "array position must be [strike, time, spot, vol]");
    return bs::price({as_double(pos[0], "strike"), as_double(pos[1], "time"), as_double(pos[2], "spot"),
                      as_double(pos[3], "vol")});
  }
  if (!pos.is_object()) fail(ErrorCode::DomainError, "position must be an array or an object");
  auto field = [&](const char* key) {
    auto it = pos.find(key);
    if (it == pos.end()) fail(ErrorCode::DomainError, std::string("position is missing '") + key + "'");
    return as_double(*it, key);
  };
  double quantity = pos.contains("quantity") ? as_double(pos["quantity"], "quantity") : 1.0;
  return quantity * bs::price({field("strike"), field("time"), field("spot"), field("vol")});
}

}  // namespace

Package basic_arithmetic() {
  Package p("basic_arithmetic");
  p.add("add", {"a", "b"}, [](std::span<const Value> a) -> Result {
    return number(as_double(a[0], "a") + as_double(a[1], "b"));
  });
  p.add("subtract", {"a", "b"}, [](std::span<const Value> a) -> Result {
    return number(as_double(a[0], "a") - as_double(a[1], "b"));
  });
  p.add("multiply", {"a", "b"}, [](std::span<const Value> a) -> Result {
    return number(as_double(a[0], "a") * as_double(a[1], "b"));
  });
  p.add("divide", {"a", "b"}, [](std::span<const Value> a) -> Result {
    double b = as_double(a[1], "b");
    if (b == 0.0) fail(ErrorCode::DomainError, "division by zero");
    return number(as_double(a[0], "a") / b);
  });
  p.add("is_positive", {"x"}, [](std::span<const Value> a) -> Result {
    return Value(as_double(a[0], "x") > 0.0);
  });
  return p;
}

Package pricer() {
  Package p("pricer");
  p.add("price", kOptionParams, option_fn<bs::price>);
  p.add("delta", kOptionParams, option_fn<bs::delta>);
  p.add("gamma", kOptionParams, option_fn<bs::gamma>);
  p.add("vega", kOptionParams, option_fn<bs::vega>);
  p.add("implied_vol", {"strike", "time", "spot", "price"}, [](std::span<const Value> a) -> Result {
    return number(bs::implied_vol(as_double(a[0], "strike"), as_double(a[1], "time"),
                                  as_double(a[2], "spot"), as_double(a[3], "price")));
  });
  p.add("get_value", {"stock_portfolio"}, [](std::span<const Value> a) -> Result {
    const Value& book = a[0];
    if (!book.is_array()) fail(ErrorCode::DomainError, "stock_portfolio must be an array of positions");
    double total = 0.0;
    for (std::size_t i = 0; i < book.size(); ++i) {
      try {
        total += position_value(book[i]);
      } catch (const Error& e) {
        throw Error(e.code(), "position " + std::to_string(i) + ": " + e.what());
      }
    }
    return number(total);
  });
  return p;
}

Package higher_order_arithmetic() {
  Package p("higher_order_arithmetic");
  p.add("add", {"x"}, [](std::span<const Value> a) -> Result {
    double x = as_double(a[0], "x");
    return lambda::make_function("higher_order_arithmetic.add(" + dump(a[0]) + ")", {"y"},
                                 [x](std::span<const Value> b) -> Result { return number(x + as_double(b[0], "y")); });
  });
  return p;
}

Package weather() {
  Package p("weather");
  p.add("get_weather", {"latitude", "longitude"}, [](std::span<const Value> a) -> Result {
    double lat = as_double(a[0], "latitude");
    double lon = as_double(a[1], "longitude");
    if (lat < -90.0 || lat > 90.0) fail(ErrorCode::DomainError, "latitude must lie in [-90, 90]");
    if (lon < -180.0 || lon > 180.0) fail(ErrorCode::DomainError, "longitude must lie in [-180, 180]");
    return Value{{"temp_c", number(synthetic_temperature(lat, lon))}};
  });
  return p;
}

std::vector<std::string> builtin_names() {
  return {"basic_arithmetic", "higher_order_arithmetic", "pricer", "weather"};
}

lambda::Registry make_registry(std::span<const std::string> enabled) {
  lambda::Registry registry;
  for (const auto& name : enabled) {
    if (name == "basic_arithmetic") registry.register_package(basic_arithmetic());
    else if (name == "higher_order_arithmetic") registry.register_package(higher_order_arithmetic());
    else if (name == "pricer") {
      registry.register_package(pricer());
      registry.add_alias("option_pricer", "pricer");
    }
    else if (name == "weather") registry.register_package(weather());
    else fail(ErrorCode::BadRequest, "unknown package '" + name + "'");
  }
  return registry;
}

lambda::Registry make_registry() {
  auto all = builtin_names();
  return make_registry(all);
}

}  // namespace fast::packages

#pragma once

#include <span>
#include <string>
#include <vector>

#include "fast/lambda_machine.hpp"

namespace fast::packages {

/// European call under zero rates and dividends.
namespace black_scholes {

struct OptionParams {
  double strike;
  double time;
  double spot;
  double vol;
};

/// DomainError unless all inputs are finite and positive, vol <= 10 and
/// time <= 100.
void check(const OptionParams& p);

double norm_cdf(double x);
double norm_pdf(double x);

double price(const OptionParams& p);
double delta(const OptionParams& p);
double gamma(const OptionParams& p);
double vega(const OptionParams& p);

/// Bisection over vol in (1e-6, 10). NoSolution unless
/// max(spot - strike, 0) < target < spot, or when no vol in range attains it.
double implied_vol(double strike, double time, double spot, double target);

}  // namespace black_scholes

/// Synthetic, deterministic stand-in for a weather service.
double synthetic_temperature(double latitude, double longitude);

lambda::Package basic_arithmetic();
lambda::Package pricer();
lambda::Package higher_order_arithmetic();
lambda::Package weather();

std::vector<std::string> builtin_names();

/// A registry holding the named builtin packages. BadRequest for an unknown
/// name, DuplicatePackage for a repeated one.
lambda::Registry make_registry(std::span<const std::string> enabled);
lambda::Registry make_registry();

}  // namespace fast::packages

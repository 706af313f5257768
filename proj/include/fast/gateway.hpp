#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fast/error.hpp"
#include "fast/lambda_machine.hpp"
#include "fast/rest_machine.hpp"
#include "fast/template_resolver.hpp"
#include "fast/value.hpp"

namespace fast::gateway {

/// An HTTP request reduced to what the router needs. `path` and the
/// parameter pairs are percent-decoded.
struct WireRequest {
  std::string method;
  std::string path;
  std::vector<std::pair<std::string, std::string>> params;
  std::string body;
  std::string content_type;
};

struct WireResponse {
  int status = 200;
  Value body;

  std::string text() const { return dump(body); }
};

enum class RouteKind { Health, Rest, Lambda, Fast, Query };

/// Access control hook point. Returning false answers 403 before the handler
/// runs. Unset means allow all.
using AccessHook = std::function<bool(const WireRequest&, RouteKind)>;

struct GatewayOptions {
  int depth_limit = templates::kDefaultDepthLimit;
  bool check_purity = false;
  AccessHook access;
};

/// Parameter names that never become function arguments.
bool is_reserved_param(std::string_view name) noexcept;

/// Error code -> HTTP status. Every code maps to one of 400, 404, 405, 413,
/// 422 or 500.
int status_for(ErrorCode code) noexcept;

/// Routes requests to the REST machine, the Lambda machine, the template
/// resolver and the query evaluator. Stateless apart from the store.
class Gateway {
 public:
  Gateway(rest::ResourceStore& store, const lambda::LambdaMachine& machine, GatewayOptions options = {});

  /// Never throws: every failure becomes an error response with a "message".
  WireResponse route(const WireRequest& req) const;

  const GatewayOptions& options() const noexcept { return options_; }

 private:
  WireResponse handle_rest(const WireRequest& req) const;
  WireResponse handle_lambda(const WireRequest& req, std::string module, std::string function) const;
  WireResponse handle_fast(const WireRequest& req, std::string module, std::string function) const;
  WireResponse handle_query(const WireRequest& req) const;

  rest::ResourceStore& store_;
  const lambda::LambdaMachine& machine_;
  GatewayOptions options_;
  templates::Resolver resolver_;
};

}  // namespace fast::gateway

#pragma once

#include <memory>
#include <string>

#include "fast/config.hpp"
#include "fast/gateway.hpp"
#include "fast/lambda_machine.hpp"
#include "fast/rest_machine.hpp"

namespace httplib {
class Request;
class Server;
}  // namespace httplib

namespace fast {

gateway::WireRequest to_wire(const httplib::Request& req);

/// One running FAST service: the store, the Lambda machine built from the
/// enabled packages, the gateway and an HTTP listener in front of them.
class Service {
 public:
  /// Validates the config and loads the store file when it exists.
  explicit Service(const Config& config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  rest::ResourceStore& store() noexcept { return store_; }
  const lambda::LambdaMachine& machine() const noexcept { return machine_; }
  const gateway::Gateway& gateway() const noexcept { return gateway_; }

  /// Binds config.host:config.port (port 0 picks a free port). Returns the
  /// bound port, or -1 on failure.
  int bind();
  /// Blocks serving requests until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

  /// Writes the store file, if one is configured.
  void flush() const;

 private:
  Config config_;
  rest::ResourceStore store_;
  lambda::LambdaMachine machine_;
  gateway::Gateway gateway_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace fast

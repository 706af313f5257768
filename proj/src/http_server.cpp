#include "fast/http_server.hpp"

#include <filesystem>

#include <httplib.h>

#include "fast/builtin_packages.hpp"
#include "fast/url.hpp"

namespace fast {

namespace {

Config validated(Config c) {
  if (c.packages.empty()) c.packages = packages::builtin_names();
  c.validate();
  return c;
}

void send(const gateway::WireResponse& r, httplib::Response& res) {
  res.status = r.status;
  res.set_content(r.text(), "application/json");
}

}  // namespace

gateway::WireRequest to_wire(const httplib::Request& req) {
  gateway::WireRequest wire;
  wire.method = req.method;
  wire.path = req.path;
  // parameters come from the raw target; httplib also folds form bodies into
  // req.params, which the gateway handles itself
  if (auto q = req.target.find('?'); q != std::string::npos) {
    wire.params = url::parse_query(std::string_view(req.target).substr(q + 1));
  }
  wire.body = req.body;
  wire.content_type = req.get_header_value("Content-Type");
  return wire;
}

Service::Service(const Config& config)
    : config_(validated(config)),
      store_(config_.max_bytes),
      machine_(packages::make_registry(config_.packages), &store_, {config_.map_workers}),
      gateway_(store_, machine_, {config_.depth, config_.check_purity, {}}),
      http_(std::make_unique<httplib::Server>()) {
  if (config_.store_file && std::filesystem::exists(*config_.store_file)) {
    store_.load(*config_.store_file);
  }
  // headroom so the gateway, not httplib, answers oversized bodies with JSON
  http_->set_payload_max_length(config_.max_bytes * 2 + 65536);
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    send(gateway_.route(to_wire(req)), res);
  };
  const std::string any = R"(/.*)";
  http_->Get(any, handler);
  http_->Post(any, handler);
  http_->Put(any, handler);
  http_->Delete(any, handler);
  http_->Patch(any, handler);
  http_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      std::string msg = res.status == 413 ? "payload too large" : httplib::status_message(res.status);
      res.set_content(dump(Value{{"message", msg}}), "application/json");
    }
  });
}

Service::~Service() { stop(); }

int Service::bind() {
  if (config_.port == 0) {
    int port = http_->bind_to_any_port(config_.host);
    if (port > 0) config_.port = port;
    return port;
  }
  return http_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
}

bool Service::listen() { return http_->listen_after_bind(); }

void Service::stop() {
  if (http_ && http_->is_running()) http_->stop();
}

void Service::wait_until_ready() const { http_->wait_until_ready(); }

void Service::flush() const {
  if (config_.store_file) store_.save(*config_.store_file);
}

}  // namespace fast

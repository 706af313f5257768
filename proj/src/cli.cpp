#include "fast/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <pthread.h>

#include "fast/error.hpp"
#include "fast/http_server.hpp"
#include "fast/rest_machine.hpp"
#include "fast/url.hpp"

namespace fast::cli {

namespace {

int report(const httplib::Result& res, const std::string& server, std::ostream& out, std::ostream& err) {
  if (!res) {
    err << "error: cannot reach " << server << ": " << httplib::to_string(res.error()) << '\n';
    return kServerError;
  }
  Value body = Value::parse(res->body, nullptr, false);
  if (res->status == 200) {
    out << (body.is_discarded() ? res->body : body.dump(2)) << '\n';
    return kOk;
  }
  std::string message = !body.is_discarded() && body.is_object() && body.contains("message")
                            ? body["message"].get<std::string>()
                            : res->body;
  err << "error (" << res->status << "): " << message << '\n';
  return res->status >= 500 ? kServerError : kClientError;
}

std::string encode_path(std::string_view path) {
  std::string out;
  std::size_t start = 0;
  while (start < path.size()) {
    std::size_t slash = path.find('/', start);
    if (slash == start) {
      out += '/';
      ++start;
      continue;
    }
    auto seg = path.substr(start, slash == std::string_view::npos ? path.npos : slash - start);
    out += url::percent_encode(seg);
    if (slash == std::string_view::npos) break;
    out += '/';
    start = slash + 1;
  }
  return out;
}

}  // namespace

int serve(const Config& config, std::ostream& log) {
  // signals are taken synchronously by a watcher thread
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<Service> service;
  try {
    service = std::make_unique<Service>(config);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kClientError;
  }
  int port = service->bind();
  if (port <= 0) {
    log << "error: cannot bind " << config.host << ":" << config.port << '\n';
    return kServerError;
  }
  std::string packages;
  for (const auto& m : service->machine().registry().modules()) packages += (packages.empty() ? "" : ", ") + m;
  log << "fast: listening on " << config.host << ":" << port << "; packages: " << packages << std::endl;

  std::jthread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service->stop();
  });
  service->listen();
  // wake the watcher if the server stopped on its own
  if (watcher.joinable()) pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();

  try {
    service->flush();
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kServerError;
  }
  log << "fast: stopped" << std::endl;
  return kOk;
}

int query(const std::string& server, const std::string& text, std::ostream& out, std::ostream& err) {
  httplib::Client client(server);
  client.set_connection_timeout(5);
  auto res = client.Post("/query", dump(Value{{"q", text}}), "application/json");
  return report(res, server, out, err);
}

int seed(const std::string& server, const std::string& uri, const std::string& file, std::ostream& out,
         std::ostream& err) {
  std::string target = uri.starts_with("/rest/") ? uri : "/rest/" + uri.substr(uri.starts_with("/") ? 1 : 0);
  if (!rest::ResourceUri::is_valid(target)) {
    err << "error: invalid resource URI '" << uri << "'\n";
    return kClientError;
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    err << "error: cannot read " << file << '\n';
    return kClientError;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  Value value;
  try {
    value = parse_json(buf.str());
  } catch (const Error& e) {
    err << "error: " << file << ": " << e.what() << '\n';
    return kClientError;
  }
  httplib::Client client(server);
  client.set_connection_timeout(5);
  // always wrapped, so a file that is itself {"data": ...} is stored intact
  auto res = client.Post(encode_path(target), dump(Value{{"data", value}}), "application/json");
  return report(res, server, out, err);
}

int run(int argc, char** argv) {
  CLI::App app{"FAST gateway: a REST machine and a Lambda machine behind one HTTP surface"};
  app.require_subcommand(1);

  auto* serve_cmd = app.add_subcommand("serve", "Run the gateway");
  std::string config_file;
  std::string bind;
  std::string packages;
  std::string store;
  int depth = 0;
  std::size_t max_bytes = 0;
  bool check_purity = false;
  unsigned workers = 0;
  serve_cmd->add_option("--config", config_file, "JSON config file (default: $FAST_CONFIG)");
  auto* bind_opt = serve_cmd->add_option("--bind", bind, "host:port");
  auto* packages_opt = serve_cmd->add_option("--packages", packages, "comma-separated enabled packages");
  auto* store_opt = serve_cmd->add_option("--store", store, "store snapshot file");
  auto* depth_opt = serve_cmd->add_option("--depth", depth, "template depth limit");
  auto* bytes_opt = serve_cmd->add_option("--max-bytes", max_bytes, "payload size limit");
  auto* purity_opt = serve_cmd->add_flag("--check-purity", check_purity, "evaluate every lambda call twice");
  auto* workers_opt = serve_cmd->add_option("--workers", workers, "map worker threads");

  auto* query_cmd = app.add_subcommand("query", "Evaluate a query on a running server");
  std::string server = "http://127.0.0.1:8080";
  std::string text;
  query_cmd->add_option("--server", server, "server URL");
  query_cmd->add_option("text", text, "query text")->required();

  auto* seed_cmd = app.add_subcommand("seed", "Store a JSON file as a resource");
  std::string uri;
  std::string file;
  seed_cmd->add_option("--server", server, "server URL");
  seed_cmd->add_option("--uri", uri, "target resource, e.g. /rest/trades")->required();
  seed_cmd->add_option("file", file, "JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kClientError;
  }

  if (*query_cmd) return query(server, text, std::cout, std::cerr);
  if (*seed_cmd) return seed(server, uri, file, std::cout, std::cerr);

  Config config = Config::defaults();
  try {
    if (config_file.empty()) {
      if (const char* env = std::getenv("FAST_CONFIG"); env && *env) config_file = env;
    }
    if (!config_file.empty()) config.merge_file(config_file);
    if (bind_opt->count()) config.set_bind(bind);
    if (packages_opt->count()) {
      config.packages.clear();
      std::stringstream list(packages);
      for (std::string name; std::getline(list, name, ',');) {
        if (auto trimmed = url::trim(name); !trimmed.empty()) config.packages.emplace_back(trimmed);
      }
    }
    if (store_opt->count()) config.store_file = store;
    if (depth_opt->count()) config.depth = depth;
    if (bytes_opt->count()) config.max_bytes = max_bytes;
    if (purity_opt->count()) config.check_purity = check_purity;
    if (workers_opt->count()) config.map_workers = std::max(1u, workers);
    config.validate();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kClientError;
  }
  return serve(config, std::cerr);
}

}  // namespace fast::cli

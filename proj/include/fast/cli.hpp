#pragma once

#include <iosfwd>
#include <string>

#include "fast/config.hpp"

namespace fast::cli {

/// Exit codes shared by every command.
enum Exit : int {
  kOk = 0,
  kClientError = 1,  // bad input, bad config, 4xx answers
  kServerError = 2,  // transport failure, bind failure, 5xx answers
};

/// Serves until SIGINT/SIGTERM, then flushes the store file if configured.
int serve(const Config& config, std::ostream& log);

/// Sends `text` to <server>/query and pretty-prints the result.
int query(const std::string& server, const std::string& text, std::ostream& out, std::ostream& err);

/// POSTs the JSON value in `file` to `uri` ("/rest/x", or "x" for
/// "/rest/x").
int seed(const std::string& server, const std::string& uri, const std::string& file, std::ostream& out,
         std::ostream& err);

/// Entry point behind tools/fast_main.cpp.
int run(int argc, char** argv);

}  // namespace fast::cli

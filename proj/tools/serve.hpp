#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

struct ServeConfig {
  std::uint16_t port = 0;
  std::string assets;  // directory; empty serves the built-in page
  std::string image;
  std::optional<std::string> remote;
  std::string input;  // target standard input, in-process only
  std::vector<std::string> args;
  bool once = false;  // exit after the first websocket session
};

// HTTP static files plus a websocket at /ws. Each websocket message is one
// debugger command; every reply is one JSON record per message.
int serve(const ServeConfig& config);

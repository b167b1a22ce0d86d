#include "serve.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cdb/debugger/launch.hpp"
#include "cdb/debugger/session.hpp"

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using namespace cdb;

namespace {

constexpr const char* kIndexPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>cdb</title></head>
<body>
<pre id="log"></pre>
<input id="cmd" size="60" placeholder="break file:y.x, run, bt, print name">
<script>
const ws = new WebSocket(`ws://${location.host}/ws`);
const log = document.getElementById('log');
ws.onmessage = (m) => { log.textContent += m.data + '\n'; };
document.getElementById('cmd').onkeydown = (e) => {
  if (e.key === 'Enter') { ws.send(e.target.value); e.target.value = ''; }
};
</script>
</body></html>
)";

std::string mime_type(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

http::response<http::string_body> static_response(const ServeConfig& cfg, const http::request<http::string_body>& req) {
  auto respond = [&](http::status status, std::string body, std::string type) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::content_type, type);
    res.body() = std::move(body);
    res.prepare_payload();
    res.keep_alive(false);
    return res;
  };
  std::string target(req.target());
  target = target.substr(0, target.find('?'));
  if (req.method() != http::verb::get) return respond(http::status::method_not_allowed, "GET only\n", "text/plain");
  if (target.find("..") != std::string::npos) return respond(http::status::bad_request, "bad path\n", "text/plain");
  if (target == "/") target = "/index.html";
  if (cfg.assets.empty()) {
    if (target == "/index.html") return respond(http::status::ok, kIndexPage, "text/html");
    return respond(http::status::not_found, "not found\n", "text/plain");
  }
  std::filesystem::path file = std::filesystem::path(cfg.assets) / target.substr(1);
  std::ifstream in(file, std::ios::binary);
  if (!in) return respond(http::status::not_found, "not found\n", "text/plain");
  std::stringstream body;
  body << in.rdbuf();
  return respond(http::status::ok, body.str(), mime_type(file));
}

void run_session(const ServeConfig& cfg, websocket::stream<tcp::socket>& ws) {
  auto send = [&ws](const std::string& text) {
    beast::error_code ec;
    ws.text(true);
    ws.write(net::buffer(text), ec);
  };
  std::ifstream input;
  std::ostringstream captured;
  std::unique_ptr<debugger::Target> target;
  try {
    if (cfg.remote) {
      auto [host, port] = debugger::parse_endpoint(*cfg.remote);
      target = debugger::launch_remote(cfg.image, host, port);
    } else {
      vm::MachineOptions opts;
      if (!cfg.input.empty()) {
        input.open(cfg.input, std::ios::binary);
        if (!input) throw Error("cannot open " + cfg.input);
        opts.input = &input;
      }
      opts.output = &captured;
      opts.args.push_back(cfg.image);
      opts.args.insert(opts.args.end(), cfg.args.begin(), cfg.args.end());
      target = debugger::launch_in_process(cfg.image, std::move(opts));
    }
    debugger::SessionIo io;
    io.read_command = [&ws]() -> std::optional<std::string> {
      beast::flat_buffer buf;
      beast::error_code ec;
      ws.read(buf, ec);
      if (ec) return std::nullopt;
      return beast::buffers_to_string(buf.data());
    };
    io.write = [&send](const debugger::Record& r) { send(r.json); };
    if (!cfg.remote) {
      io.target_output = [&captured] {
        std::string s = captured.str();
        captured.str({});
        return s;
      };
    }
    debugger::Session session(*target->nub, &target->image, io);
    session.run();
  } catch (const Error& e) {
    send(nlohmann::json{{"type", "error"}, {"message", e.what()}}.dump());
  }
  // A client that never answers the close frame must not wedge the accept loop.
  auto& ioc = static_cast<net::io_context&>(ws.get_executor().context());
  bool closed = false;
  ws.async_close(websocket::close_code::normal, [&closed](beast::error_code) { closed = true; });
  ioc.restart();
  ioc.run_for(std::chrono::seconds(2));
  if (!closed) {
    beast::error_code ec;
    beast::get_lowest_layer(ws).close(ec);
    ioc.restart();
    ioc.run();
  }
}

}  // namespace

int serve(const ServeConfig& cfg) {
  try {
    net::io_context ioc;
    tcp::acceptor acceptor(ioc, {net::ip::make_address("127.0.0.1"), cfg.port});
    std::cerr << "serving on http://127.0.0.1:" << acceptor.local_endpoint().port() << "/" << std::endl;
    while (true) {
      tcp::socket socket(ioc);
      acceptor.accept(socket);
      beast::flat_buffer buf;
      http::request<http::string_body> req;
      beast::error_code ec;
      http::read(socket, buf, req, ec);
      if (ec) continue;
      if (websocket::is_upgrade(req)) {
        if (req.target() != "/ws") continue;
        websocket::stream<tcp::socket> ws(std::move(socket));
        ws.accept(req, ec);
        if (ec) continue;
        run_session(cfg, ws);
        if (cfg.once) return 0;
        continue;
      }
      http::write(socket, static_response(cfg, req), ec);
      socket.shutdown(tcp::socket::shutdown_send, ec);
    }
  } catch (const std::exception& e) {
    std::cerr << "cdb: " << e.what() << std::endl;
    return 1;
  }
}

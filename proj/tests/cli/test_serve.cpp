#include <doctest.h>

#include <fstream>
#include <regex>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>
#include <json.hpp>

#include "cli_support.hpp"

using namespace cli;
using nlohmann::json;
namespace fs = std::filesystem;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;

namespace {

// Starts `cdb --serve 0 ...` and returns the port it announces.
int announced_port(testkit::Child& server) {
  auto line = server.read_err_line();
  REQUIRE(line);
  std::smatch m;
  REQUIRE(std::regex_search(*line, m, std::regex(R"(serving on http://127\.0\.0\.1:(\d+)/)")));
  return std::stoi(m[1]);
}

class WsClient {
 public:
  explicit WsClient(int port) : ws_(ioc_) {
    net::ip::tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/ws");
  }
  json read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  void send(const std::string& cmd) { ws_.write(net::buffer(cmd)); }
  // True once the server's close frame arrives.
  bool closed_by_server() {
    beast::flat_buffer buf;
    beast::error_code ec;
    ws_.read(buf, ec);
    return ec == websocket::error::closed;
  }
  // Reads records until one of the given type arrives.
  std::vector<json> until(const std::string& type) {
    std::vector<json> out;
    do out.push_back(read());
    while (out.back().at("type") != type);
    return out;
  }

 private:
  net::io_context ioc_;
  websocket::stream<net::ip::tcp::socket> ws_;
};

}  // namespace

TEST_SUITE("serve") {
  TEST_CASE("static page and websocket session with --once") {
    auto dir = testkit::scratch_dir("serve-once");
    auto image = build_image(dir, {"wf.c", "lookup.c"}, "wf.nxe");
    std::ofstream(dir / "input.txt") << "b a b";
    testkit::Child server({kCdb, "--serve", "0", "--once", "--input", (dir / "input.txt").string(), image.string()});
    int port = announced_port(server);

    httplib::Client http("127.0.0.1", port);
    auto index = http.Get("/");
    REQUIRE(index);
    CHECK(index->status == 200);
    CHECK(index->get_header_value("Content-Type") == "text/html");
    CHECK(index->body.find("/ws") != std::string::npos);
    auto missing = http.Get("/nosuch.js");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    WsClient ws(port);
    CHECK(ws.read().at("type") == "startup");
    ws.send("break wf.c:26");
    auto brk = ws.read();
    CHECK(brk.at("type") == "break");
    CHECK(brk.at("line") == 26);
    ws.send("run");
    auto stop = ws.read();
    CHECK(stop.at("type") == "stopped");
    CHECK(stop.at("function") == "getword");
    ws.send("bt");
    auto bt = ws.read();
    REQUIRE(bt.at("frames").size() == 2);
    CHECK(bt.at("frames")[1].at("function") == "main");
    ws.send("print c");
    CHECK(ws.read().at("value") == "0");
    ws.send("clear wf.c:26");
    CHECK(ws.read().at("type") == "clear");
    ws.send("continue");
    auto rest = ws.until("exited");
    CHECK(rest.front().at("type") == "output");
    CHECK(rest.front().at("text") == "1 a\n2 b\n");
    CHECK(rest.back().at("code") == 0);
    ws.send("quit");
    CHECK(ws.closed_by_server());
    CHECK(server.wait() == 0);
  }

  TEST_CASE("asset directory is served") {
    auto dir = testkit::scratch_dir("serve-assets");
    auto image = build_image(dir, {"fact.c"}, "fact.nxe");
    fs::create_directories(dir / "assets");
    std::ofstream(dir / "assets" / "index.html") << "<html>debug-ui</html>";
    std::ofstream(dir / "assets" / "app.js") << "console.log(1);";
    testkit::Child server({kCdb, "--serve", "0", "--assets", (dir / "assets").string(), image.string()});
    int port = announced_port(server);
    httplib::Client http("127.0.0.1", port);
    auto index = http.Get("/");
    REQUIRE(index);
    CHECK(index->body == "<html>debug-ui</html>");
    auto js = http.Get("/app.js");
    REQUIRE(js);
    CHECK(js->get_header_value("Content-Type") == "text/javascript");
    auto escape = http.Get("/../fact.nxe");
    REQUIRE(escape);
    CHECK(escape->status != 200);

    // Bad commands come back as error records over the socket.
    WsClient ws(port);
    CHECK(ws.read().at("type") == "startup");
    ws.send("frobnicate");
    CHECK(ws.read().at("type") == "error");
  }
}

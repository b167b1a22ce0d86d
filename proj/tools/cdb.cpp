// cdb: source-level debugger for MiniC images.

#include <unistd.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cdb/debugger/launch.hpp"
#include "cdb/debugger/session.hpp"
#include "cdb/debugger/stats.hpp"
#include "serve.hpp"

using namespace cdb;

int main(int argc, char** argv) {
  CLI::App app{"MiniC debugger"};
  std::string image_path, remote, input_path, assets;
  std::vector<std::string> args;
  bool in_process = false, json = false, stats = false, once = false;
  int serve_port = -1;
  auto* remote_opt = app.add_option("--remote", remote, "debug a target served by `nxrun --listen` (host:port)");
  app.add_flag("--in-process", in_process, "run the target inside the debugger (default)")->excludes(remote_opt);
  app.add_flag("--json", json, "one JSON object per event or response");
  app.add_option("--input", input_path, "file supplying the target's standard input (in-process)");
  app.add_option("--serve", serve_port, "serve the websocket bridge and static assets on this port")
      ->check(CLI::Range(0, 65535));
  app.add_option("--assets", assets, "static asset directory for --serve");
  app.add_flag("--once", once, "with --serve, exit after one debugging session");
  app.add_flag("--stats", stats, "print debugging-data sizes and exit");
  app.add_option("image", image_path, "executable image (.nxe)")->required()->check(CLI::ExistingFile);
  app.add_option("args", args, "target arguments (after --)");
  CLI11_PARSE(app, argc, argv);

  try {
    if (stats) {
      auto image = link::load_image(image_path);
      nub::ManifestStore store(image, std::filesystem::path(image_path).parent_path());
      std::cout << debugger::stats_report(image, store).to_text() << '\n';
      return 0;
    }
    if (serve_port >= 0) {
      ServeConfig cfg;
      cfg.port = static_cast<std::uint16_t>(serve_port);
      cfg.assets = assets;
      cfg.image = image_path;
      if (!remote.empty()) cfg.remote = remote;
      cfg.input = input_path;
      cfg.args = args;
      cfg.once = once;
      return serve(cfg);
    }

    std::unique_ptr<debugger::Target> target;
    std::ifstream target_input;
    std::ostringstream captured;
    if (!remote.empty()) {
      auto [host, port] = debugger::parse_endpoint(remote);
      target = debugger::launch_remote(image_path, host, port);
    } else {
      vm::MachineOptions opts;
      if (!input_path.empty()) {
        target_input.open(input_path, std::ios::binary);
        if (!target_input) throw Error("cannot open " + input_path);
        opts.input = &target_input;
      }
      // In JSON mode target output travels inside "output" records.
      opts.output = json ? static_cast<std::ostream*>(&captured) : &std::cout;
      opts.args.push_back(image_path);
      opts.args.insert(opts.args.end(), args.begin(), args.end());
      target = debugger::launch_in_process(image_path, std::move(opts));
    }

    auto io = debugger::stream_io(std::cin, std::cout, json, !json && ::isatty(0) ? "(cdb) " : "");
    if (json && remote.empty()) {
      io.target_output = [&captured] {
        std::string s = captured.str();
        captured.str({});
        return s;
      };
    }
    debugger::Session session(*target->nub, &target->image, io);
    session.run();
    return 0;
  } catch (const Error& e) {
    std::cout.flush();
    fmt::print(stderr, "cdb: {}\n", e.what());
    return 1;
  }
}

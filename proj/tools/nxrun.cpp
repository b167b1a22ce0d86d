// nxrun: run an executable image, optionally as a remote debugging target.

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cdb/comm/link.hpp"
#include "cdb/vm/machine.hpp"

using namespace cdb;

int main(int argc, char** argv) {
  CLI::App app{"MiniC image runner"};
  std::string image_path;
  std::vector<std::string> args;
  int port = -1;
  std::string host = "127.0.0.1";
  app.add_option("--listen", port, "wait for a debugger on this TCP port (0 picks one)")->check(CLI::Range(0, 65535));
  app.add_option("--host", host, "address to listen on");
  app.add_option("image", image_path, "executable image")->required()->check(CLI::ExistingFile);
  app.add_option("args", args, "program arguments");
  CLI11_PARSE(app, argc, argv);

  try {
    vm::MachineOptions opts;
    opts.input = &std::cin;
    opts.output = &std::cout;
    opts.args.push_back(image_path);
    opts.args.insert(opts.args.end(), args.begin(), args.end());
    vm::Machine machine(link::load_image(image_path), opts);

    if (port >= 0) {
      comm::Listener listener(static_cast<std::uint16_t>(port), host);
      fmt::print(stderr, "listening on {}\n", listener.port());
      std::fflush(stderr);
      auto peer = listener.accept();
      comm::TargetAgent agent(machine);
      auto code = comm::serve_connection(agent, *peer);
      std::cout.flush();
      if (!code) {
        fmt::print(stderr, "nxrun: debugger disconnected before the program exited\n");
        return 1;
      }
      return *code & 0xff;
    }

    const vm::RunStatus* s = &machine.resume();
    while (!std::holds_alternative<vm::Exited>(*s)) {
      if (const auto* f = std::get_if<vm::Faulted>(s)) {
        std::cout.flush();
        fmt::print(stderr, "nxrun: fault ({}) in unit {:#010x} at stopping point {}\n", vm::to_string(f->kind),
                   f->uname, f->spoint);
      }
      s = &machine.resume();
    }
    std::cout.flush();
    return std::get<vm::Exited>(*s).code & 0xff;
  } catch (const Error& e) {
    fmt::print(stderr, "nxrun: {}\n", e.what());
    return 1;
  }
}

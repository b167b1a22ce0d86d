#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "cdb/comm/link.hpp"
#include "cdb/link/image.hpp"
#include "cdb/nub/nub.hpp"
#include "cdb/nub/symbol_store.hpp"
#include "cdb/vm/machine.hpp"

namespace cdb::debugger {

// Everything a debugging session needs, owned together. machine and agent
// are null for remote targets.
struct Target {
  link::ExecutableImage image;
  std::unique_ptr<vm::Machine> machine;
  std::unique_ptr<comm::TargetAgent> agent;
  std::unique_ptr<comm::TargetLink> link;
  std::unique_ptr<nub::ManifestStore> symbols;
  std::unique_ptr<nub::Nub> nub;
};

// Symbol files are looked up next to the image.
std::unique_ptr<Target> launch_in_process(const std::filesystem::path& image, vm::MachineOptions options);
std::unique_ptr<Target> launch_remote(const std::filesystem::path& image, const std::string& host, std::uint16_t port);

// "host:port"; throws cdb::Error when malformed.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace cdb::debugger

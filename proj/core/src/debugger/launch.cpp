#include "cdb/debugger/launch.hpp"

#include <charconv>

namespace cdb::debugger {

namespace {

std::unique_ptr<Target> load(const std::filesystem::path& image) {
  auto t = std::make_unique<Target>();
  t->image = link::load_image(image.string());
  t->symbols = std::make_unique<nub::ManifestStore>(t->image, image.parent_path());
  return t;
}

}  // namespace

std::unique_ptr<Target> launch_in_process(const std::filesystem::path& image, vm::MachineOptions options) {
  auto t = load(image);
  t->machine = std::make_unique<vm::Machine>(t->image, std::move(options));
  t->agent = std::make_unique<comm::TargetAgent>(*t->machine);
  t->link = std::make_unique<comm::DirectLink>(*t->agent);
  t->nub = std::make_unique<nub::Nub>(*t->link, *t->symbols);
  return t;
}

std::unique_ptr<Target> launch_remote(const std::filesystem::path& image, const std::string& host, std::uint16_t port) {
  auto t = load(image);
  t->link = comm::RemoteLink::connect(host, port);
  t->nub = std::make_unique<nub::Nub>(*t->link, *t->symbols);
  return t;
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
  auto colon = endpoint.rfind(':');
  if (colon == std::string::npos) throw Error("expected host:port, got '" + endpoint + "'");
  std::string host = endpoint.substr(0, colon);
  unsigned port = 0;
  const char* first = endpoint.data() + colon + 1;
  const char* last = endpoint.data() + endpoint.size();
  auto [p, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || p != last || port == 0 || port > 65535) throw Error("bad port in '" + endpoint + "'");
  return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(port)};
}

}  // namespace cdb::debugger

#pragma once

#include <memory>
#include <string>

#include "cdb/comm/agent.hpp"
#include "cdb/comm/message.hpp"

namespace cdb::comm {

// Disconnects and requests after the session ended.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Debugger-side view of the target. Strictly request/reply; the target only
// runs inside request(Continue{}).
class TargetLink {
 public:
  virtual ~TargetLink() = default;
  virtual StartupEvent startup() = 0;
  virtual Message request(const Message& m) = 0;
};

// Same address space: calls the agent directly.
class DirectLink final : public TargetLink {
 public:
  explicit DirectLink(TargetAgent& agent) : agent_(agent) {}
  StartupEvent startup() override { return agent_.startup(); }
  Message request(const Message& m) override;

 private:
  TargetAgent& agent_;
  bool ended_ = false;
};

class Socket;

// Separate process over a TCP stream.
class RemoteLink final : public TargetLink {
 public:
  // Reads the target's startup event as part of connecting.
  static std::unique_ptr<RemoteLink> connect(const std::string& host, std::uint16_t port);
  ~RemoteLink() override;

  StartupEvent startup() override { return startup_; }
  Message request(const Message& m) override;

 private:
  explicit RemoteLink(std::unique_ptr<Socket> s);
  std::unique_ptr<Socket> socket_;
  StartupEvent startup_;
  bool ended_ = false;
};

// Target-side server loop for one debugger connection: sends the startup
// event, then answers requests until the exit event has been delivered and
// the peer disconnects. Returns the program's exit code if it exited.
std::optional<int> serve_connection(TargetAgent& agent, Socket& peer);

// Minimal blocking TCP stream.
class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  static std::unique_ptr<Socket> connect(const std::string& host, std::uint16_t port);
  void write_all(std::span<const std::byte> bytes);
  // False on clean end of stream before any byte was read.
  bool read_exact(std::span<std::byte> out);

  void send(const Message& m);
  // nullopt on clean disconnect between frames.
  std::optional<Message> receive();
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

class Listener {
 public:
  // Port 0 picks a free port; see port().
  explicit Listener(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<Socket> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace cdb::comm

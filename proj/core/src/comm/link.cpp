#include "cdb/comm/link.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <fmt/format.h>

namespace cdb::comm {

namespace {

bool is_event_reply(const Message& m) {
  return std::holds_alternative<BreakEvent>(m) || std::holds_alternative<FaultEvent>(m) ||
         std::holds_alternative<ExitEvent>(m);
}

std::string sys_error(const char* what) { return fmt::format("{}: {}", what, std::strerror(errno)); }

}  // namespace

Message DirectLink::request(const Message& m) {
  if (ended_) throw TransportError("target session has ended");
  Message reply = agent_.handle(m);
  if (std::holds_alternative<ExitEvent>(reply)) ended_ = true;
  return reply;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Socket> Socket::connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res); rc != 0) {
    throw TransportError(fmt::format("cannot resolve {}: {}", host, ::gai_strerror(rc)));
  }
  int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw TransportError(sys_error("socket"));
  }
  int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) {
    std::string msg = sys_error(fmt::format("connect to {}:{}", host, port).c_str());
    ::close(fd);
    throw TransportError(msg);
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<Socket>(fd);
}

void Socket::write_all(std::span<const std::byte> bytes) {
  while (!bytes.empty()) {
    ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(sys_error("send"));
    }
    bytes = bytes.subspan(static_cast<std::size_t>(n));
  }
}

bool Socket::read_exact(std::span<std::byte> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(sys_error("recv"));
    }
    if (n == 0) {
      if (got == 0) return false;
      throw TransportError("connection closed mid-frame");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

void Socket::send(const Message& m) { write_all(encode(m)); }

std::optional<Message> Socket::receive() {
  Bytes frame(4);
  if (!read_exact(frame)) return std::nullopt;
  std::uint32_t n = ByteReader(frame).get_u32le();
  if (n == 0 || n > kMaxFrame) throw ProtocolError(fmt::format("bad frame length {}", n));
  frame.resize(4 + n);
  if (!read_exact(std::span(frame).subspan(4))) throw TransportError("connection closed mid-frame");
  return decode(frame);
}

Listener::Listener(std::uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError(sys_error("socket"));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw TransportError(fmt::format("bad listen address {}", host));
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 4) != 0) {
    std::string msg = sys_error(fmt::format("listen on {}:{}", host, port).c_str());
    ::close(fd_);
    throw TransportError(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Socket> Listener::accept() {
  while (true) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<Socket>(fd);
    }
    if (errno != EINTR) throw TransportError(sys_error("accept"));
  }
}

RemoteLink::RemoteLink(std::unique_ptr<Socket> s) : socket_(std::move(s)) {}
RemoteLink::~RemoteLink() = default;

std::unique_ptr<RemoteLink> RemoteLink::connect(const std::string& host, std::uint16_t port) {
  std::unique_ptr<RemoteLink> link(new RemoteLink(Socket::connect(host, port)));
  auto first = link->socket_->receive();
  if (!first) throw TransportError("target closed the connection before starting");
  const auto* s = std::get_if<StartupEvent>(&*first);
  if (!s) throw ProtocolError(fmt::format("expected STARTUP_EVENT, got {}", kind_name(*first)));
  link->startup_ = *s;
  return link;
}

Message RemoteLink::request(const Message& m) {
  if (ended_) throw TransportError("target session has ended");
  socket_->send(m);
  auto reply = socket_->receive();
  if (!reply) {
    ended_ = true;
    throw TransportError("target disconnected");
  }
  if (std::holds_alternative<ExitEvent>(*reply)) ended_ = true;
  if (std::holds_alternative<Continue>(m) && !is_event_reply(*reply) && !std::holds_alternative<ErrorReply>(*reply)) {
    throw ProtocolError(fmt::format("CONTINUE answered by {}", kind_name(*reply)));
  }
  return *reply;
}

std::optional<int> serve_connection(TargetAgent& agent, Socket& peer) {
  peer.send(agent.startup());
  while (true) {
    std::optional<Message> req;
    try {
      req = peer.receive();
    } catch (const Error&) {
      break;
    }
    if (!req) break;
    peer.send(agent.handle(*req));
  }
  if (const auto* e = std::get_if<vm::Exited>(&agent.machine().status())) return e->code;
  return std::nullopt;
}

}  // namespace cdb::comm

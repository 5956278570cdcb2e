// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "b2dr/common/error.hpp"

namespace b2dr {

namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(left);
}

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, const char* data, std::size_t len, bool is_socket) {
  while (len > 0) {
    const ssize_t n = is_socket ? ::send(fd, data, len, MSG_NOSIGNAL) : ::write(fd, data, len);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError("bridge write failed: " + errno_text());
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

class ChildChannel : public LineChannel {
 public:
  ChildChannel(int read_fd, int write_fd, pid_t pid) : LineChannel(read_fd, write_fd, false), pid_(pid) {}
  ~ChildChannel() override {
    close_fds();
    // Give the child a moment to exit on EOF before forcing it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

 private:
  pid_t pid_;
};

}  // namespace

LineChannel::LineChannel(int read_fd, int write_fd, bool is_socket)
    : read_fd_(read_fd), write_fd_(write_fd), is_socket_(is_socket) {}

LineChannel::~LineChannel() { close_fds(); }

void LineChannel::close_fds() {
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  read_fd_ = -1;
  write_fd_ = -1;
}

void LineChannel::send_line(const std::string& line) {
  if (write_fd_ < 0) throw BackendError("bridge channel closed");
  std::string framed = line;
  framed.push_back('\n');
  write_all(write_fd_, framed.data(), framed.size(), is_socket_);
}

std::optional<std::string> LineChannel::recv_line(int timeout_ms) {
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms < 0 ? 0 : timeout_ms);
  char chunk[65536];
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    if (read_fd_ < 0) return std::nullopt;
    pollfd p{read_fd_, POLLIN, 0};
    const int wait = timeout_ms < 0 ? -1 : remaining_ms(deadline);
    const int rc = ::poll(&p, 1, wait);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw BackendError("bridge poll failed: " + errno_text());
    }
    if (rc == 0) throw TimeoutError("renderer timeout");
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError("bridge read failed: " + errno_text());
    }
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      std::string line = std::move(buffer_);
      buffer_.clear();
      return line;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::pair<std::string, int> parse_host_port(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw ConfigError("expected host:port, got '" + text + "'");
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("bad port in '" + text + "'");
  }
  if (port < 0 || port > 65535) throw ConfigError("port out of range in '" + text + "'");
  return {text.substr(0, colon), port};
}

std::unique_ptr<LineChannel> connect_tcp(const std::string& host, int port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || res == nullptr)
    throw BackendError("cannot resolve '" + host + "'");
  std::string last_error = "no address";
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms < 0 ? 0 : timeout_ms);
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      pollfd p{fd, POLLOUT, 0};
      rc = ::poll(&p, 1, timeout_ms < 0 ? -1 : remaining_ms(deadline));
      if (rc == 0) {
        ::close(fd);
        ::freeaddrinfo(res);
        throw TimeoutError("renderer timeout");
      }
      int err = 0;
      socklen_t len = sizeof err;
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      rc = err == 0 ? 0 : -1;
      errno = err;
    }
    if (rc == 0) {
      ::fcntl(fd, F_SETFL, flags);
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      ::freeaddrinfo(res);
      return std::make_unique<LineChannel>(fd, fd, true);
    }
    last_error = errno_text();
    ::close(fd);
  }
  ::freeaddrinfo(res);
  throw BackendError("cannot connect to " + host + ":" + std::to_string(port) + ": " + last_error);
}

std::unique_ptr<LineChannel> spawn_exec(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) throw BackendError("pipe failed: " + errno_text());
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw BackendError("pipe failed: " + errno_text());
  }
  ::signal(SIGPIPE, SIG_IGN);
  const pid_t pid = ::fork();
  if (pid < 0) throw BackendError("fork failed: " + errno_text());
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
  return std::make_unique<ChildChannel>(from_child[0], to_child[1], pid);
}

std::unique_ptr<LineChannel> open_endpoint(const std::string& endpoint, int timeout_ms) {
  if (endpoint.rfind("tcp://", 0) == 0) {
    const auto [host, port] = parse_host_port(endpoint.substr(6));
    return connect_tcp(host, port, timeout_ms);
  }
  if (endpoint.rfind("exec:", 0) == 0) {
    if (endpoint.size() == 5) throw ConfigError("exec endpoint needs a command");
    return spawn_exec(endpoint.substr(5));
  }
  throw ConfigError("unsupported endpoint '" + endpoint + "' (expected tcp://host:port or exec:<command>)");
}

TcpListener::TcpListener(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || res == nullptr)
    throw ConfigError("cannot resolve listen address '" + host + "'");
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw BackendError("socket failed: " + errno_text());
  }
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd_, 4) != 0) {
    const std::string err = errno_text();
    ::freeaddrinfo(res);
    ::close(fd_);
    throw BackendError("cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
  }
  ::freeaddrinfo(res);
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineChannel> TcpListener::accept(int timeout_ms) {
  pollfd p{fd_, POLLIN, 0};
  for (;;) {
    const int rc = ::poll(&p, 1, timeout_ms);
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw BackendError("poll failed: " + errno_text());
    if (rc == 0) throw TimeoutError("renderer timeout");
    break;
  }
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw BackendError("accept failed: " + errno_text());
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<LineChannel>(fd, fd, true);
}

void relay_bytes(LineChannel& a, LineChannel& b) {
  if (!a.pending().empty()) write_all(b.write_fd(), a.pending().data(), a.pending().size(), true);
  if (!b.pending().empty()) write_all(a.write_fd(), b.pending().data(), b.pending().size(), true);
  char chunk[65536];
  for (;;) {
    pollfd fds[2] = {{a.read_fd(), POLLIN, 0}, {b.read_fd(), POLLIN, 0}};
    const int rc = ::poll(fds, 2, -1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw BackendError("relay poll failed: " + errno_text());
    }
    for (int i = 0; i < 2; ++i) {
      if ((fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
      const ssize_t n = ::read(fds[i].fd, chunk, sizeof chunk);
      if (n <= 0) return;
      LineChannel& dst = i == 0 ? b : a;
      write_all(dst.write_fd(), chunk, static_cast<std::size_t>(n), true);
    }
  }
}

}  // namespace b2dr

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>

namespace b2dr {

/// Newline-delimited message channel over a pair of file descriptors.
class LineChannel {
 public:
  /// Takes ownership of the descriptors. `is_socket` selects send() so a
  /// closed peer raises an error instead of SIGPIPE.
  LineChannel(int read_fd, int write_fd, bool is_socket);
  virtual ~LineChannel();
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  /// Writes `line` plus a newline. Throws BackendError when the peer is gone.
  void send_line(const std::string& line);
  /// Next line without its newline, or nullopt at end of stream. Throws
  /// TimeoutError("renderer timeout") when nothing complete arrives within
  /// `timeout_ms` (negative waits forever).
  std::optional<std::string> recv_line(int timeout_ms);

  int read_fd() const { return read_fd_; }
  int write_fd() const { return write_fd_; }
  /// Bytes already read past the last returned line.
  const std::string& pending() const { return buffer_; }

 protected:
  void close_fds();

 private:
  int read_fd_;
  int write_fd_;
  bool is_socket_;
  std::string buffer_;
};

/// Parses "host:port". Throws ConfigError.
std::pair<std::string, int> parse_host_port(const std::string& text);

/// TCP client connection. Throws BackendError on refusal, TimeoutError when
/// the connect itself exceeds the deadline.
std::unique_ptr<LineChannel> connect_tcp(const std::string& host, int port, int timeout_ms);

/// Runs `/bin/sh -c command` with its stdin/stdout as the channel. The child
/// is terminated when the channel is destroyed.
std::unique_ptr<LineChannel> spawn_exec(const std::string& command);

/// "tcp://host:port" or "exec:<command>".
std::unique_ptr<LineChannel> open_endpoint(const std::string& endpoint, int timeout_ms);

class TcpListener {
 public:
  /// Port 0 picks a free port.
  TcpListener(const std::string& host, int port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  int port() const { return port_; }
  /// Throws TimeoutError when nobody connects in time (negative waits forever).
  std::unique_ptr<LineChannel> accept(int timeout_ms);

 private:
  int fd_ = -1;
  int port_ = 0;
};

/// Copies bytes both ways until either side closes. Buffered input already
/// read by recv_line is forwarded first.
void relay_bytes(LineChannel& a, LineChannel& b);

}  // namespace b2dr

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "b2dr/render/image_io.hpp"
#include "b2dr/render/oracle.hpp"
#include "b2dr/render/protocol.hpp"
#include "b2dr/render/transport.hpp"

namespace b2dr::test {

enum class StubMode {
  kIdentity,     // echo prev, horizon gradient when absent
  kPalette,      // masks composited over the horizon gradient
  kSilent,       // acknowledges, then never answers a render
  kBadVersion,   // acknowledges with version 2
  kGarbageFrame  // answers with an undecodable image payload
};

// Renderer side of one bridge session, served on a loopback port.
class StubRenderer {
 public:
  explicit StubRenderer(StubMode mode) : listener_("127.0.0.1", 0), mode_(mode) {
    thread_ = std::thread([this] { serve(); });
  }
  ~StubRenderer() { finish(); }
  StubRenderer(const StubRenderer&) = delete;
  StubRenderer& operator=(const StubRenderer&) = delete;

  std::string endpoint() const { return "tcp://127.0.0.1:" + std::to_string(listener_.port()); }
  int renders() const { return renders_; }
  // Stops serving and returns the first error the stub hit, if any.
  std::string finish() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
    return failure_;
  }

 private:
  std::optional<std::string> next_line(LineChannel& ch) {
    while (!stop_) {
      try {
        return ch.recv_line(50);
      } catch (const TimeoutError&) {
      }
    }
    return std::nullopt;
  }

  void serve() {
    try {
      std::unique_ptr<LineChannel> ch;
      while (!stop_ && !ch) {
        try {
          ch = listener_.accept(50);
        } catch (const TimeoutError&) {
        }
      }
      if (!ch) return;
      const auto hello_line = next_line(*ch);
      if (!hello_line) return;
      const bridge::HelloMessage hello = bridge::decode_hello(bridge::parse_message(*hello_line));
      bridge::json ack = bridge::make_hello_ack();
      if (mode_ == StubMode::kBadVersion) ack["b2dr_bridge_version"] = 2;
      ch->send_line(ack.dump());
      for (;;) {
        const auto line = next_line(*ch);
        if (!line) return;
        const bridge::RenderMessage msg = bridge::decode_render(bridge::parse_message(*line), hello.camera_names);
        ++renders_;
        if (mode_ == StubMode::kSilent) continue;
        if (mode_ == StubMode::kGarbageFrame) {
          bridge::json frame = bridge::make_frame(msg.tick, {});
          for (std::size_t i = 0; i < hello.camera_names.size(); ++i) frame["images"].push_back("bm90IGEgcG5n");
          ch->send_line(frame.dump());
          continue;
        }
        std::vector<Image> out;
        for (std::size_t c = 0; c < hello.camera_names.size(); ++c) {
          const Image gradient = horizon_gradient(hello.width, hello.height);
          if (mode_ == StubMode::kIdentity)
            out.push_back(msg.prev[c] ? *msg.prev[c] : gradient);
          else
            out.push_back(composite_masks(gradient, msg.masks[c], msg.classes));
        }
        ch->send_line(bridge::make_frame(msg.tick, out).dump());
      }
    } catch (const std::exception& e) {
      failure_ = e.what();
    }
  }

  TcpListener listener_;
  StubMode mode_;
  std::atomic<bool> stop_{false};
  std::atomic<int> renders_{0};
  std::string failure_;
  std::thread thread_;
};

}  // namespace b2dr::test

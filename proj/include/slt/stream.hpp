#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>

#include "slt/geometry.hpp"
#include "slt/pipeline.hpp"

namespace slt {

/// One SLT1 datagram:
///   "SLT1 <seq> <timestamp_ms> <0|1>[ <x_cm> <z_cm>]\n"
/// Positions carry three decimals.
struct StreamPacket {
  std::uint32_t seq = 0;
  std::int64_t timestamp_ms = 0;
  std::optional<WorldPosition> pos;
};

inline constexpr std::size_t kMaxPacketBytes = 128;

std::string encode(const StreamPacket& packet);
std::string encode(const PositionEstimate& est, std::uint32_t seq);
/// Throws ParseError on anything that encode() would not produce.
StreamPacket decode(std::string_view datagram);

/// Fire-and-forget UDP publisher. publish() never blocks on the network: it
/// hands the estimate to a bounded queue drained by a sender thread, and
/// drops the oldest queued estimate when the queue is full.
class PositionPublisher {
 public:
  /// `endpoint` is "host:port". Throws ConfigError if it does not resolve.
  explicit PositionPublisher(const std::string& endpoint,
                             std::size_t queue_capacity = 64);
  ~PositionPublisher();

  PositionPublisher(const PositionPublisher&) = delete;
  PositionPublisher& operator=(const PositionPublisher&) = delete;

  void publish(const PositionEstimate& est);

  /// Sends whatever is still queued, then stops the sender thread.
  void close();

  std::uint64_t published() const noexcept { return published_.load(); }
  std::uint64_t sent() const noexcept { return sent_.load(); }
  std::uint64_t dropped() const noexcept { return dropped_.load(); }
  std::uint64_t send_failures() const noexcept { return failures_.load(); }

 private:
  void run();

  int socket_ = -1;
  std::string endpoint_;
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<StreamPacket> queue_;
  bool stopping_ = false;
  std::uint32_t next_seq_ = 0;
  std::atomic<std::uint64_t> published_{0};
  std::atomic<std::uint64_t> sent_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> failures_{0};
  std::thread sender_;
};

/// Publishes every estimate in order to `endpoint`, then flushes.
void serve(std::span<const PositionEstimate> estimates,
           const std::string& endpoint);

/// Parses "host:port"; throws ConfigError on a malformed string.
std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint);

}  // namespace slt

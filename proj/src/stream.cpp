#include "slt/stream.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <iostream>
#include <vector>

#include "slt/errors.hpp"
#include "slt/io.hpp"

namespace slt {

std::string encode(const StreamPacket& packet) {
  std::string out = "SLT1 " + std::to_string(packet.seq) + ' ' +
                    std::to_string(packet.timestamp_ms) + ' ';
  if (packet.pos) {
    out += "1 " + format_fixed(packet.pos->x) + ' ' + format_fixed(packet.pos->z);
  } else {
    out += '0';
  }
  out += '\n';
  return out;
}

std::string encode(const PositionEstimate& est, std::uint32_t seq) {
  return encode(StreamPacket{seq, est.timestamp_ms, est.pos});
}

namespace {

template <typename T>
T parse_token(std::string_view tok, std::size_t offset, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("SLT1: bad ") + what, offset);
  }
  return value;
}

}  // namespace

StreamPacket decode(std::string_view datagram) {
  if (datagram.size() > kMaxPacketBytes) {
    throw ParseError("SLT1: datagram exceeds 128 bytes", kMaxPacketBytes);
  }
  if (datagram.empty() || datagram.back() != '\n') {
    throw ParseError("SLT1: missing trailing newline", datagram.size());
  }
  const std::string_view body = datagram.substr(0, datagram.size() - 1);
  std::vector<std::pair<std::string_view, std::size_t>> tokens;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t sp = body.find(' ', start);
    const std::size_t end = sp == std::string_view::npos ? body.size() : sp;
    tokens.emplace_back(body.substr(start, end - start), start);
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  if (tokens.empty() || tokens[0].first != "SLT1") {
    throw ParseError("SLT1: bad protocol tag", 0);
  }
  if (tokens.size() != 4 && tokens.size() != 6) {
    throw ParseError("SLT1: wrong field count", 0);
  }
  StreamPacket p;
  p.seq = parse_token<std::uint32_t>(tokens[1].first, tokens[1].second, "seq");
  p.timestamp_ms =
      parse_token<std::int64_t>(tokens[2].first, tokens[2].second, "timestamp");
  const auto& [flag, flag_at] = tokens[3];
  if (flag == "1" && tokens.size() == 6) {
    p.pos = WorldPosition{
        parse_token<double>(tokens[4].first, tokens[4].second, "x_cm"),
        parse_token<double>(tokens[5].first, tokens[5].second, "z_cm")};
  } else if (!(flag == "0" && tokens.size() == 4)) {
    throw ParseError("SLT1: detected flag disagrees with field count", flag_at);
  }
  // Anything encode() would print differently (leading zeros, '+', wrong
  // decimal count) is rejected.
  if (encode(p) != datagram) {
    throw ParseError("SLT1: non-canonical field formatting", 0);
  }
  return p;
}

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint) {
  const std::size_t colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    throw ConfigError("stream", "endpoint must be host:port, got \"" + endpoint + "\"");
  }
  std::string host = endpoint.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  const std::string port_text = endpoint.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(),
                                   port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() ||
      port == 0 || port > 65535) {
    throw ConfigError("stream", "bad port in endpoint \"" + endpoint + "\"");
  }
  return {host, static_cast<std::uint16_t>(port)};
}

PositionPublisher::PositionPublisher(const std::string& endpoint,
                                     std::size_t queue_capacity)
    : endpoint_(endpoint), capacity_(queue_capacity == 0 ? 1 : queue_capacity) {
  const auto [host, port] = split_endpoint(endpoint);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(),
                               &hints, &res);
  if (rc != 0 || res == nullptr) {
    throw ConfigError("stream", "cannot resolve " + endpoint + ": " +
                                    ::gai_strerror(rc));
  }
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      socket_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(res);
  if (socket_ < 0) {
    throw ConfigError("stream", "cannot open a datagram socket to " + endpoint);
  }
  sender_ = std::thread([this] { run(); });
}

PositionPublisher::~PositionPublisher() {
  close();
  if (socket_ >= 0) ::close(socket_);
}

void PositionPublisher::publish(const PositionEstimate& est) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) return;
    if (queue_.size() >= capacity_) {
      queue_.pop_front();
      ++dropped_;
    }
    queue_.push_back(StreamPacket{next_seq_++, est.timestamp_ms, est.pos});
    ++published_;
  }
  ready_.notify_one();
}

void PositionPublisher::close() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  ready_.notify_one();
  if (sender_.joinable()) sender_.join();
}

void PositionPublisher::run() {
  while (true) {
    StreamPacket packet;
    {
      std::unique_lock lock(mutex_);
      ready_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      packet = queue_.front();
      queue_.pop_front();
    }
    const std::string bytes = encode(packet);
    const ssize_t n = ::send(socket_, bytes.data(), bytes.size(),
                             MSG_DONTWAIT | MSG_NOSIGNAL);
    if (n == static_cast<ssize_t>(bytes.size())) {
      ++sent_;
    } else {
      const int err = errno;
      const std::uint64_t count = ++failures_;
      if (count == 1 || count % 1000 == 0) {
        std::cerr << "slt: send to " << endpoint_ << " failed (" << count
                  << " so far): " << std::strerror(err) << '\n';
      }
    }
  }
}

void serve(std::span<const PositionEstimate> estimates,
           const std::string& endpoint) {
  PositionPublisher publisher(endpoint);
  for (const auto& e : estimates) publisher.publish(e);
  publisher.close();
}

}  // namespace slt

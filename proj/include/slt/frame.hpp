#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace slt {

/// 8-bit grayscale image, row-major, top row first.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, std::int64_t timestamp_ms = 0,
        std::int64_t index = 0);
  Frame(int width, int height, std::vector<std::uint8_t> pixels,
        std::int64_t timestamp_ms = 0, std::int64_t index = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::int64_t timestamp_ms() const noexcept { return timestamp_ms_; }
  std::int64_t index() const noexcept { return index_; }
  void set_timestamp_ms(std::int64_t t) noexcept { timestamp_ms_ = t; }
  void set_index(std::int64_t i) noexcept { index_ = i; }

  std::uint8_t at(int u, int v) const noexcept {
    return pixels_[static_cast<std::size_t>(v) * width_ + u];
  }
  std::uint8_t& at(int u, int v) noexcept {
    return pixels_[static_cast<std::size_t>(v) * width_ + u];
  }

  std::span<const std::uint8_t> row(int v) const noexcept {
    return {pixels_.data() + static_cast<std::size_t>(v) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<std::uint8_t> row(int v) noexcept {
    return {pixels_.data() + static_cast<std::size_t>(v) * width_,
            static_cast<std::size_t>(width_)};
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  /// Pixel equality only; timestamp and index are metadata.
  bool same_pixels(const Frame& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && pixels_ == o.pixels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::int64_t timestamp_ms_ = 0;
  std::int64_t index_ = 0;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace slt

#include "slt/frame.hpp"

#include <stdexcept>

namespace slt {

Frame::Frame(int width, int height, std::int64_t timestamp_ms,
             std::int64_t index)
    : Frame(width, height,
            std::vector<std::uint8_t>(
                width > 0 && height > 0
                    ? static_cast<std::size_t>(width) * height
                    : 0),
            timestamp_ms, index) {}

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels,
             std::int64_t timestamp_ms, std::int64_t index)
    : width_(width),
      height_(height),
      timestamp_ms_(timestamp_ms),
      index_(index),
      pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("Frame: dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("Frame: pixel count != width*height");
  }
}

}  // namespace slt

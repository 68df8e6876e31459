#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slt {

/// A geometric computation with no physical solution, e.g. a reflection that
/// would have to lie behind the camera.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configuration that violates an invariant. `key()` names the offending
/// field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Malformed input data (out-of-order streams, misaligned sequences).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file or wire payload. `offset()` is the byte (or line, for
/// line-oriented formats) where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace slt

#pragma once

#include <stdexcept>
#include <string>

namespace admix {

/// Malformed arguments to a library call (bad index, length mismatch, ...).
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value. `key()` carries the dotted key path when
/// the value came from a config file or flag.
class ConfigError : public std::invalid_argument {
  public:
    explicit ConfigError(const std::string &message, std::string key = {})
        : std::invalid_argument(key.empty() ? message : key + ": " + message),
          key_(std::move(key)) {}

    [[nodiscard]] const std::string &key() const noexcept { return key_; }

  private:
    std::string key_;
};

/// Problem exceeds a hard size guard (dense 2^n storage, exhaustive search).
class SizeError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// File system failure; the message includes the offending path.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace admix

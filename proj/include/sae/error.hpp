#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sae {

/// Failure category. Maps onto CLI exit codes.
enum class ErrorKind { config, numeric, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Stable machine-readable tag, e.g. "E_CONFIG".
  std::string_view code() const noexcept {
    switch (kind_) {
      case ErrorKind::config: return "E_CONFIG";
      case ErrorKind::numeric: return "E_NUMERIC";
      case ErrorKind::io: return "E_IO";
    }
    return "E_UNKNOWN";
  }

  /// 2 config, 3 numeric, 4 I/O.
  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::config: return 2;
      case ErrorKind::numeric: return 3;
      case ErrorKind::io: return 4;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
};

/// Invalid input: bad configuration, dimension mismatch, violated precondition.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Non-finite values, divergence, failed factorization.
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

inline void require_length(std::string_view what, std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw ConfigError(std::string(what) + ": expected length " + std::to_string(expected) +
                      ", got " + std::to_string(actual));
  }
}

}  // namespace sae

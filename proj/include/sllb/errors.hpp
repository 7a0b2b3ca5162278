#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sllb {

/// Error categories. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  config = 2,
  dimension = 3,
  regime = 4,
  index = 5,
  blow_up = 6,
  statistics = 7,
  unsupported = 8,
  io = 9,
  syntax = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::dimension, w) {}
};
struct RegimeError : Error {
  explicit RegimeError(const std::string& w) : Error(ErrorKind::regime, w) {}
};
struct IndexError : Error {
  explicit IndexError(const std::string& w) : Error(ErrorKind::index, w) {}
};
struct StatisticsError : Error {
  explicit StatisticsError(const std::string& w) : Error(ErrorKind::statistics, w) {}
};
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& w) : Error(ErrorKind::unsupported, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};
struct SyntaxError : Error {
  SyntaxError(const std::string& w, int line)
      : Error(ErrorKind::syntax, "line " + std::to_string(line) + ": " + w), line(line) {}
  int line;
};

/// Raised when a state becomes non-finite; carries the step at which it happened.
struct BlowUpError : Error {
  BlowUpError(std::size_t step, double t)
      : Error(ErrorKind::blow_up,
              "non-finite state at step " + std::to_string(step) + " (t=" + std::to_string(t) + ")"),
        step(step),
        time(t) {}
  std::size_t step;
  double time;
};

}  // namespace sllb

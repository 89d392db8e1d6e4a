#pragma once

#include <stdexcept>
#include <string>

namespace airkit {

/// Input data or parameters were rejected by an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A heartbeat stream that violates ordering or content rules.
class HeartbeatError : public InvalidArgument {
 public:
  HeartbeatError(const std::string& what, std::size_t index)
      : InvalidArgument(what + " (record " + std::to_string(index) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Weibull hazard at t = 0 with shape < 1 diverges.
class InfiniteHazard : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace airkit

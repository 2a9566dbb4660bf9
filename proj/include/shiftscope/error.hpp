#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shiftscope {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates the expected format or a type invariant.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Caller passed arguments outside an operation's preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A pool does not hold enough items of some kind to satisfy a request.
class InsufficientItems : public Error {
 public:
  InsufficientItems(std::string what_kind, std::uint64_t requested, std::uint64_t available)
      : Error("insufficient " + what_kind + " items: requested " + std::to_string(requested) +
              ", available " + std::to_string(available) + ", deficit " +
              std::to_string(requested - available)),
        kind_(std::move(what_kind)),
        requested_(requested),
        available_(available) {}

  const std::string& kind() const noexcept { return kind_; }
  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t available() const noexcept { return available_; }
  std::uint64_t deficit() const noexcept { return requested_ - available_; }

 private:
  std::string kind_;
  std::uint64_t requested_;
  std::uint64_t available_;
};

}  // namespace shiftscope

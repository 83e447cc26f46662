#pragma once

#include <stdexcept>
#include <string>

namespace fsdim {

// Base for all library errors. Certified digit arithmetic reports
// unresolved digits through result flags instead of throwing.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad base, negative count,
// q outside [0,1), malformed block, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A sequence could not supply the digits an operation needs.
class InsufficientDigits : public Error {
 public:
  InsufficientDigits(std::size_t needed, std::size_t available)
      : Error("insufficient digits: needed " + std::to_string(needed) +
              ", available " + std::to_string(available)),
        needed_(needed),
        available_(available) {}

  std::size_t needed() const noexcept { return needed_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t needed_;
  std::size_t available_;
};

// A digit file does not conform to the ASCII or binary layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A carry could not be resolved within the available lookahead.
class UnresolvedCarry : public Error {
 public:
  explicit UnresolvedCarry(std::size_t position)
      : Error("unresolved carry at digit " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace fsdim

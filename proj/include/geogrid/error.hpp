#pragma once

#include <stdexcept>
#include <string>

namespace geogrid {

/// Base error for all invalid inputs and contract violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure with a position (byte offset or line number).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t position)
      : Error(what + " at offset " + std::to_string(position)),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

}  // namespace geogrid

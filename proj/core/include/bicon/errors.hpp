#ifndef BICON_ERRORS_HPP
#define BICON_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bicon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contract violation on in-memory inputs: shape mismatch, out-of-range values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed file content. offset() is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t offset)
      : Error(message + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Non-finite loss or parameter encountered during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bicon

#endif  // BICON_ERRORS_HPP

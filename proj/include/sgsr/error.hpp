#pragma once

#include <stdexcept>
#include <string>

namespace sgsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its content is not in the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied value violates a precondition (sizes, ranges, shapes).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace sgsr

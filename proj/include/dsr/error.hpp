#pragma once

#include <stdexcept>
#include <string>

namespace dsr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Pixel coordinate outside the valid domain of an operation.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Violated precondition on a parameter (k out of range, size mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace dsr

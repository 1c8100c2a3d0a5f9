#pragma once

#include <stdexcept>
#include <string>

namespace topoforge {

/// Base for all library errors; message is user facing.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for unreadable, unwritable or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace topoforge

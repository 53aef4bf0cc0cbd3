#pragma once

#include <stdexcept>
#include <string>

namespace segcut {

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter or precondition violated by the caller.
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Input data is malformed or inconsistent (file contents, dimensions).
class DataError : public Error {
  public:
    using Error::Error;
};

/// Parse failure with a location inside the source ("line 12", "byte 340").
class ParseError : public DataError {
  public:
    ParseError(const std::string& source, const std::string& location, const std::string& what)
        : DataError(source + ": " + location + ": " + what), location_(location) {}

    const std::string& location() const noexcept { return location_; }

  private:
    std::string location_;
};

}  // namespace segcut

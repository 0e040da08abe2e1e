#pragma once

#include <stdexcept>
#include <string>

namespace rsrlab {

// Base class for all errors raised by the library. Commands catch this at
// the top level and turn it into a nonzero exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct ArgumentError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
// Config-file syntax problems; message carries the line number.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace rsrlab

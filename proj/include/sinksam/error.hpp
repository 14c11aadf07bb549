#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sinksam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, configs, arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Parse failure at a specific line of a text file.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Two rasters or masks that must agree in shape or georeferencing do not.
class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

/// Filesystem failure (unreadable/unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sinksam

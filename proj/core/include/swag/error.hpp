#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swag {

// Base class for every error raised by the library. `kind()` is a short
// stable token that the command line tool prints as the failure reason.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message);
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Malformed or out-of-range input data. Carries the 1-based line number
// when the offending value came from a file (0 otherwise).
class InputError : public Error {
 public:
  explicit InputError(const std::string& message, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& message) : Error("index", message) {}
};

class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& message) : Error("sampling", message) {}
};

// Non-finite values appeared during the forward pass or training.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& message) : Error("divergence", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace swag

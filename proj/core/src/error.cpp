#include "swag/error.hpp"

namespace swag {

Error::Error(std::string kind, const std::string& message)
    : std::runtime_error(message), kind_(std::move(kind)) {}

static std::string with_line(const std::string& message, std::size_t line) {
  if (line == 0) return message;
  return "line " + std::to_string(line) + ": " + message;
}

InputError::InputError(const std::string& message, std::size_t line)
    : Error("input", with_line(message, line)), line_(line) {}

}  // namespace swag

#pragma once

#include <stdexcept>
#include <string>

namespace occsim {

/// Raised when a scenario or sweep configuration is structurally invalid.
/// `field()` names the offending configuration entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error("config error at '" + field + "': " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when a frame-trace file cannot be parsed. `line()` is 1-based.
class TraceFormatError : public std::runtime_error {
public:
    TraceFormatError(std::size_t line, const std::string& message)
        : std::runtime_error("trace format error at line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

} // namespace occsim

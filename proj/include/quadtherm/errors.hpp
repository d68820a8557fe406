#pragma once

#include <stdexcept>
#include <string>

namespace quadtherm {

/// Raised when a configuration file fails to parse or validate.
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace quadtherm

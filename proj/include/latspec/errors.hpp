#pragma once

#include <stdexcept>
#include <string>

namespace latspec {

/// Bad user input (config files, CLI flags, malformed CSV). The CLI maps this
/// to exit code 2; other runtime failures map to exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace latspec

#pragma once

#include <stdexcept>
#include <string>

namespace physmom {

/// Bad strategy/run configuration (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Missing or malformed input data (CLI exit code 2).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace physmom

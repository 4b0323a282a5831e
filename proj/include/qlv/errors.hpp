#pragma once

#include <stdexcept>
#include <string>

namespace qlv {

// Bad or inconsistent user-supplied configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (non-finite state, eigensolver breakdown, failed
// integrity check). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A simulation hit its piece-capacity cap. CLI exit code 4.
class CapacityHalt : public std::runtime_error {
public:
    explicit CapacityHalt(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qlv

#pragma once

#include <stdexcept>
#include <string>

namespace tpjc {

// Invalid configuration or invalid physical parameters.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical-convergence failure: cutoff guard, step-size underflow,
// trace drift, degenerate steady state, unconverged emission window.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tpjc

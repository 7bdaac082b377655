// errors.hpp: exception types shared by the refrigerator models and the oracle

#pragma once

#include <stdexcept>
#include <string>

namespace qfridge {

// A physical constraint is violated (e.g. a negative dressed frequency).
class PhysicsError : public std::domain_error {
public:
    explicit PhysicsError(const std::string& what) : std::domain_error(what) {}
};

// A solver did not reach its tolerance, or a generator has a degenerate kernel.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Bad user configuration (unknown key, missing field, out-of-range value).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace qfridge

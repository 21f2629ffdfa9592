#pragma once

#include <stdexcept>
#include <string>

namespace hopfspec {

/// Invalid configuration or flag combination, detected before any heavy work.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of an operation (r <= 0, wrong regime, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Mismatched grids or vector dimensions.
class DimensionError : public ConfigError {
public:
    explicit DimensionError(const std::string& what) : ConfigError(what) {}
};

/// Numerical failure at runtime (solver breakdown, NaN, non-convergence).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hopfspec

#pragma once

#include <stdexcept>
#include <string>

namespace oas {

// Invalid model parameters, budgets, or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure failed to converge or produced an unusable result.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Target-MSE calibration could not bracket or converge on a target.
class CalibrationError : public NumericalError {
public:
    explicit CalibrationError(const std::string& what) : NumericalError(what) {}
};

// The posterior MSE profile does not have the single-peak shape the
// two-threshold stopping rule relies on.
class StructuralError : public NumericalError {
public:
    explicit StructuralError(const std::string& what) : NumericalError(what) {}
};

// File system failure while reading inputs or writing results.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace oas

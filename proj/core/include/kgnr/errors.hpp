#pragma once

#include <stdexcept>
#include <string>

namespace kgnr {

// Invalid parameters, configuration, or file contents. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// Numerical failure while running (divergence, non-finite values, broken
// internal consistency). CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

} // namespace kgnr

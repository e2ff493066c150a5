// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace qreset {

// malformed run configuration: sizes, step counts, profile invariants
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// fixed-point solve that did not reach tolerance; carries the last residual
class IterationError : public std::runtime_error {
public:
    IterationError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// requested accuracy cannot be met (e.g. Fock truncation too aggressive)
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedProfileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace qreset

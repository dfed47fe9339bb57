#pragma once
#include <stdexcept>
#include <string>

namespace annulus {

// Invalid configuration value; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature, solver or validation failure; maps to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the physical domain (e.g. radius not in [r1, r2]).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace annulus

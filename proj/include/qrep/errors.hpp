#pragma once

#include <stdexcept>
#include <string>

namespace qrep {

// Bad user input: out-of-range parameters, malformed config, unknown names.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The computation itself went numerically bad (ill-conditioned quadratic
// form, truncation leak above tolerance, non-convergence).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A state or map failed a physical consistency check (negative population,
// broken commutation constraint, trace above one).
class ValidityError : public std::runtime_error {
public:
    explicit ValidityError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qrep

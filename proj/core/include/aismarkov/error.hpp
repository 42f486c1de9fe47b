#pragma once

#include <stdexcept>
#include <string>

namespace aismarkov {

/// Invalid configuration: missing columns, overlapping windows, bad grid.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Unusable input data (as opposed to a bad configuration).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Power iteration did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, long iterations, double last_delta)
        : std::runtime_error(what), iterations_(iterations), last_delta_(last_delta) {}

    long iterations() const noexcept { return iterations_; }
    double last_delta() const noexcept { return last_delta_; }

private:
    long iterations_;
    double last_delta_;
};

} // namespace aismarkov

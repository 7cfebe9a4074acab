#pragma once

#include <stdexcept>
#include <string>

namespace wigneton {

// Malformed or inconsistent run configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Solver failure: non-convergence, instability, missing modes. Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure. Exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter value for which the operation is undefined (e.g. hbar = 0 in
// the Moyal bracket).
class DegenerateParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace wigneton

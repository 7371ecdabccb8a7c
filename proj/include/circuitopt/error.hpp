#pragma once

#include <stdexcept>
#include <string>

namespace circuitopt {

/// Base class for all circuitopt errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed circuit code, bad file contents, invalid option values.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Grammar violations in circuit-code strings.
class ParseError : public ConfigError {
public:
    explicit ParseError(const std::string& msg) : ConfigError(msg) {}
};

/// Numerical failures: singular matrices, eigensolver non-convergence,
/// Hilbert-space budget overruns.
class NumericsError : public Error {
public:
    explicit NumericsError(const std::string& msg) : Error(msg) {}
};

} // namespace circuitopt

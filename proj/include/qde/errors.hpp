// Error kinds shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace qde {

enum class ErrorKind {
    validation,          // malformed input or violated type invariant
    dimension_mismatch,
    not_positive,        // eigenvalue below -psd_tolerance
    not_normalized,
    resource,            // dimension / branch / window cap exceeded
    unsupported,         // e.g. non-commuting conditional expectation
    convergence,         // eigensolver failure
    infinite,            // quantity required to be finite is +inf
    property_violation   // asserted identity or inequality failed
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qde

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace compsel {

/// Malformed input (bad JSON, bad CSV, wrong format version).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally valid input that violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when some requirements are provided by no surviving component,
/// so no subset can ever cover them.
class UncoverableError : public ValidationError {
public:
    explicit UncoverableError(std::vector<std::string> missing_ids);

    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

} // namespace compsel

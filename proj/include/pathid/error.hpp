#pragma once

#include <stdexcept>
#include <string>

namespace pathid {

// Out-of-domain physical input (negative gain, nonpositive bandwidth, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The requested quantity is undefined for this input (0/0 visibilities etc.).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text or binary input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Well-formed input that violates a field invariant. `path()` names the field.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Unsorted time-tag input detected while merging.
class OrderingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pathid

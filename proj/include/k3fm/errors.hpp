#pragma once

#include <stdexcept>
#include <string>

namespace k3fm {

// Malformed or out-of-domain input (CLI exit code 2).
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Well-formed input that no engine in this library handles (exit code 3).
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A brute-force enumeration would exceed the configured group-order cap (exit code 4).
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An internal cross-check failed. Always a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace k3fm

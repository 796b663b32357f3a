#pragma once

#include <stdexcept>
#include <string>

namespace fvep {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// History index or series length mismatch.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A numerical evaluation could not reach its requested tolerance.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The operation is not defined for the requested model.
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An internal invariant was violated.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace fvep

#pragma once

#include <stdexcept>
#include <string>

namespace frackit {

/// Argument outside an operation's documented domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not certify its result. Carries the best
/// value available at the point of failure.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double best_value)
        : std::runtime_error(what), best_value_(best_value) {}

    double best_value() const noexcept { return best_value_; }

private:
    double best_value_;
};

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class Divergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Intermediate quantity exceeded double range.
class OverflowError : public NumericalError {
public:
    OverflowError(const std::string& what, long index)
        : NumericalError(what, 0.0), index_(index) {}

    long index() const noexcept { return index_; }

private:
    long index_;
};

}  // namespace frackit

#ifndef MULTIGIBBS_ERRORS_HPP
#define MULTIGIBBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace multigibbs {

/// Argument lies outside the mathematical domain (e.g. a mean outside the support hull).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Exact computation would exceed the configured enumeration budget.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// Hypothesis of an operation does not hold for the given inputs.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input combination the implementation deliberately does not handle.
struct UnsupportedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numerical self-check failed (non-monotone predicate, too many optimizers, ...).
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace multigibbs

#endif // MULTIGIBBS_ERRORS_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace geonet {

/// Caller violated an operation's precondition (e.g. points too far apart to connect).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input data is structurally inconsistent (partition vs. geometry, bad config).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Point is not on the manifold within tolerance.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative solver failed (shooting non-convergence, integrator blow-up).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A flow step stretched a segment past inj/2 or collapsed a segment; shrink dt or re-subdivide.
class StepTooLongError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph invariant broken while projecting a cycle to a net (odd degree vertex).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace geonet

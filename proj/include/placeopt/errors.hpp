#pragma once

#include <stdexcept>
#include <string>

namespace placeopt {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition or argument contract was violated (bad sizes, nonpositive
/// values, dimension mismatch, ...).
class contract_error : public error {
public:
    using error::error;
};

/// A sensor coincides with the target, so no bearing exists.
class degenerate_geometry_error : public error {
public:
    using error::error;
};

/// The request is outside the supported problem sizes (e.g. equivalence
/// search beyond n = 8) or outside the supported model set (mixed kinds).
class unsupported_error : public error {
public:
    using error::error;
};

/// No placement with the requested property exists for the given inputs
/// (e.g. tight construction from an irregular coefficient sequence).
class infeasible_error : public error {
public:
    using error::error;
};

/// The integrator detected an increase of the descending potential; the
/// step size is too large for the current state.
class step_size_error : public error {
public:
    using error::error;
};

/// Non-finite state or an unrecoverable numerical breakdown.
class numerical_error : public error {
public:
    using error::error;
};

/// An internal consistency check failed (a constructor produced an output
/// that does not certify).
class internal_error : public error {
public:
    using error::error;
};

}  // namespace placeopt

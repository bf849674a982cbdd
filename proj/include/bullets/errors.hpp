#pragma once

/**
 * @file errors.hpp
 * @brief Domain error hierarchy.
 *
 * Every condition the library refuses to guess about is a distinct exception
 * type, so callers (and the CLI exit-code mapping) can tell a misuse from a
 * degenerate input.  All of them derive from bullets::Error.
 */

#include <stdexcept>
#include <string>

namespace bullets {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid input data (bad field value, malformed file, bad flag value).
/// The message names the offending field.
struct Invalid : Error {
    using Error::Error;
};

/// Two half-lines with the same speed never meet transversally; speeds must
/// be pairwise distinct before any meeting time is requested.
struct EqualSpeeds : Error {
    using Error::Error;
};

/// A permutation or vector has the wrong length for the operation.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// The resolved shot sequence hit a tie that has no well-defined outcome:
/// a bullet belongs to two simultaneous colliding pairs (equivalently, three
/// live trajectories pass through one point).
struct SingularParameter : Error {
    using Error::Error;
};

/// A computation that requires a generic parameter detected a coincidence
/// (three concurrent virtual half-lines).
struct NotGeneric : Error {
    using Error::Error;
};

/// The sign-table recursion found a first bullet that meets someone, yet no
/// candidate partner whose meeting point clears every other line.  Surfaced,
/// never repaired.
struct RecursionStuck : Error {
    using Error::Error;
};

/// A constrained-count crossing is ambiguous: a trajectory endpoint lies
/// exactly on the reference segment (other than a collision with the
/// segment's own bullet).
struct DegenerateConstraint : Error {
    using Error::Error;
};

/// An exhaustive computation was asked to exceed its configured bound.
struct SizeLimit : Error {
    using Error::Error;
};

/// A statistic was requested from an empty sample.
struct EmptySample : Error {
    using Error::Error;
};

} // namespace bullets

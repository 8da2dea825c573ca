#pragma once

#include "skeltrop/rational.hpp"

#include <stdexcept>
#include <string>

namespace skeltrop {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input documents (JSON syntax, schema violations).
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// A graph, morphism or correspondence failed validation.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Point not on the expected graph, or a parameter outside its range.
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Bad constructor parameter (n < 2, p < 5, max_iter = 0, ...).
struct ParameterError : Error {
    explicit ParameterError(const std::string& what) : Error(what) {}
};

/// Operation its preconditions rule out (e.g. minimal model of a
/// non-hyperbolic graph).
struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& what) : Error(what) {}
};

/// Component-group computations need integer edge lengths; carries the
/// factor by which lengths must be rescaled to clear denominators.
struct IntegralityError : Error {
    IntegralityError(const std::string& what, Int lcm)
        : Error(what + " (rescale lengths by " + lcm.str() + ")"), rescale_lcm(std::move(lcm)) {}
    Int rescale_lcm;
};

/// The map induced on dual lattices does not descend to component groups;
/// signals non-functorial input data.
struct DescentError : Error {
    explicit DescentError(const std::string& what) : Error(what) {}
};

} // namespace skeltrop

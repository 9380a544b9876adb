#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgl {

// Base class for everything thrown on purpose. The CLI maps input-side
// failures (ParseError) to exit code 2 and all other Error subclasses to 3.
class Error : public std::runtime_error {
public:
    explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Malformed input: files, JSON, vertex labels, flag values.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input outside an operation's domain (vertex not in
// region, negative time, empty sample, t-grid not increasing, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A matrix that had to be positive definite was not. Carries a direction
// of nonpositive curvature when the solver found one.
class DefinitenessError : public Error {
public:
    DefinitenessError(std::string msg, std::vector<double> direction = {})
        : Error(std::move(msg)), direction_(std::move(direction)) {}

    const std::vector<double>& direction() const { return direction_; }

private:
    std::vector<double> direction_;
};

// Resolvent asked for a spectral parameter at or above the bottom eigenvalue.
class SpectralParameterError : public Error {
public:
    using Error::Error;
};

// Generalized eigenvalue problem with an identically vanishing weight.
class DegenerateWeightError : public Error {
public:
    using Error::Error;
};

// An iterative scheme ran out of its iteration budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// The certified-nonnegativity precondition h >= 0 failed on a truncation.
class FormNotNonnegativeError : public Error {
public:
    using Error::Error;
};

// classify() did not return Subcritical, so no minimal Green function
// can be produced.
class NoMinimalGreenError : public Error {
public:
    using Error::Error;
};

// Bottom eigenvalue not simple where a spectral-gap argument needs it.
class MultiplicityError : public Error {
public:
    using Error::Error;
};

// Integral known to diverge for the requested parameters (lattice Green
// function in dimension < 3).
class DivergentIntegralError : public Error {
public:
    using Error::Error;
};

// Hard size cap exceeded (dense oracle > 2000 vertices, Harnack window > 16).
class SizeError : public Error {
public:
    using Error::Error;
};

// Valid input the implementation deliberately does not cover.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

} // namespace sgl

#pragma once

#include <stdexcept>
#include <string>

namespace phasefield {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidPotential : public Error {
public:
    using Error::Error;
};

class InvalidGrid : public Error {
public:
    using Error::Error;
};

class InvalidInitialData : public Error {
public:
    using Error::Error;
};

/// A pivot vanished during a tridiagonal or dense elimination.
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// The companion-matrix eigen-solve for the roots of f'' did not converge.
class RootFindingFailure : public Error {
public:
    using Error::Error;
};

/// Newton iteration of the convex-splitting step hit its iteration cap.
class NewtonDivergence : public Error {
public:
    using Error::Error;
};

}  // namespace phasefield

#pragma once

#include <stdexcept>
#include <string>

namespace sdtd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid game parameters or scenario options.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Degenerate or inadmissible planar configuration (coincident players,
/// attacker inside the capture disk, defender already at the target).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A reduced-state operation was asked for a state off the capture circle.
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Oval parameter outside the admissible cone.
class OutOfSupportError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// No trajectory / no inverse solution exists for the requested data.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

class NonTerminationError : public Error {
public:
    using Error::Error;
};

/// External strategy process misbehaved.
class PluginError : public Error {
public:
    using Error::Error;
};

}  // namespace sdtd

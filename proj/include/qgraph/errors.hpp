#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Disconnected graph, bad vertex id, empty edge set.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Length vector with no positive entry.
class DegenerateGraphError : public Error {
public:
    using Error::Error;
};

class UnsupportedTopologyError : public Error {
public:
    using Error::Error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Scan would exceed the evaluation budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

class NoEigenspaceError : public Error {
public:
    using Error::Error;
};

/// Raised when a quantity needs a simple spectral gap and k1 is degenerate.
class MultiplicityError : public Error {
public:
    MultiplicityError(const std::string& what, int multiplicity)
        : Error(what), multiplicity_(multiplicity) {}
    int multiplicity() const { return multiplicity_; }

private:
    int multiplicity_;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NotApplicableError : public Error {
public:
    using Error::Error;
};

class InvalidGroupError : public Error {
public:
    using Error::Error;
};

}  // namespace qgraph

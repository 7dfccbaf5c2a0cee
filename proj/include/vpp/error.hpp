#pragma once

#include <stdexcept>
#include <string>

namespace vpp {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad input data: malformed contracts, inconsistent scenario files,
/// config mistakes. Maps to CLI exit code 1.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Solver trouble: numerical failure, limits hit where a result was
/// required, unexpected infeasibility. Maps to CLI exit code 2.
struct SolverError : Error {
    explicit SolverError(const std::string& what) : Error(what) {}
};

/// Filesystem and parsing I/O failures. Maps to CLI exit code 3.
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace vpp

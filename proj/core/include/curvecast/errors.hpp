#pragma once

#include <stdexcept>
#include <string>

namespace curvecast {

/// Caller broke a documented precondition (bad argument, mismatched grids,
/// malformed config). Maps to CLI exit code 2.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Input data is structurally unusable (parse failure, non-contiguous years,
/// too few observations). Maps to CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical procedure failed (singular system, degenerate spectrum).
/// Maps to CLI exit code 4.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace curvecast

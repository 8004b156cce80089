#ifndef RTKM_ERROR_HPP
#define RTKM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rtkm {

// Caller passed arguments that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Input data is malformed (ragged CSV, bad labels, inconsistent truth).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or a numerical breakdown during a computation.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rtkm

#endif  // RTKM_ERROR_HPP

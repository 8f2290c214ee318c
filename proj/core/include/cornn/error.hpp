#pragma once

#include <stdexcept>
#include <string>

namespace cornn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside a function's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unknown function id, topology, algorithm or label.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Shape or length mismatch between parameters and architecture/data.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Raised when a train-set evaluation is requested on a spent meter.
class BudgetExhausted : public Error {
public:
    using Error::Error;
};

/// Malformed file content. Carries the 1-based row and column when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(row == 0 ? what
                         : what + " (row " + std::to_string(row) + ", column " +
                               std::to_string(column) + ")"),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Invalid configuration, precondition violation or degenerate data.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace cornn

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybreg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (shape, symmetry, dof, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class ShapeError : public ContractError {
public:
    using ContractError::ContractError;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

/// Malformed input text; carries the 1-based data row and 0-based column.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row),
          column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class DegenerateFactorError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Matrix that must be invertible is numerically rank deficient.
class RankError : public Error {
public:
    using Error::Error;
};

class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

/// rank(Psi) == n: residual SS is structurally zero and sigma^2 cannot be estimated.
class SaturatedModelError : public Error {
public:
    using Error::Error;
};

class TestUnavailableError : public Error {
public:
    using Error::Error;
};

class UndefinedStatisticError : public Error {
public:
    using Error::Error;
};

/// Two computations that must agree by construction did not.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

class DomainError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Wraps a per-row failure with the 1-based row it came from.
class RowError : public Error {
public:
    RowError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class NoSolutionError : public Error {
public:
    NoSolutionError(const std::string& what, double residual_low, double residual_high)
        : Error(what), residual_low_(residual_low), residual_high_(residual_high) {}

    double residual_low() const noexcept { return residual_low_; }
    double residual_high() const noexcept { return residual_high_; }

private:
    double residual_low_;
    double residual_high_;
};

}  // namespace hybreg

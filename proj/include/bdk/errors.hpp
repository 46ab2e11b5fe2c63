#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace bdk {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A schedule or config description is missing a required field.
class SpecError : public Error {
  public:
    using Error::Error;
};

/// A value violates a documented invariant. `where` names the offending
/// index or key path.
class ValidationError : public Error {
  public:
    ValidationError(std::string where, const std::string& what)
        : Error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

  private:
    std::string where_;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

/// Infinite extent requested without a truncation hint.
class TruncationError : public Error {
  public:
    using Error::Error;
};

/// Truncation refinement hit its state cap before the sup-change fell below tol.
class NoConvergence : public Error {
  public:
    using Error::Error;
};

class SingularSystem : public Error {
  public:
    using Error::Error;
};

class NotIrreducible : public Error {
  public:
    using Error::Error;
};

/// A Siegmund dual rate came out negative: the input chain is not
/// stochastically monotone. Carries the witness pair.
class NotMonotone : public Error {
  public:
    NotMonotone(std::int64_t from, std::int64_t to, double rate)
        : Error("negative dual rate " + std::to_string(rate) + " at (" +
                std::to_string(from) + ", " + std::to_string(to) + ")"),
          from_(from), to_(to), rate_(rate) {}
    std::int64_t from() const noexcept { return from_; }
    std::int64_t to() const noexcept { return to_; }
    double rate() const noexcept { return rate_; }

  private:
    std::int64_t from_;
    std::int64_t to_;
    double rate_;
};

class DegenerateDenominator : public Error {
  public:
    using Error::Error;
};

/// An identity was requested outside the hypotheses under which it holds.
class HypothesisViolated : public Error {
  public:
    using Error::Error;
};

class QuadratureNoConvergence : public Error {
  public:
    using Error::Error;
};

/// Malformed config text, with 1-based line and column.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace bdk

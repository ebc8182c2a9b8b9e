#pragma once

#include <stdexcept>
#include <string>

namespace ntrailer {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Vehicle description rejected by validation (empty vehicle, missing or
/// unexpected hitches, too few wheels).
class ValidationError : public Error {
public:
  enum class Code { EmptyVehicle, MissingHitch, UnexpectedHitch, TractorTooFewWheels, TooFewWheels };

  ValidationError(Code code, int unit, const std::string& msg)
      : Error(msg), code_(code), unit_(unit) {}

  Code code() const { return code_; }
  int unit() const { return unit_; }

private:
  Code code_;
  int unit_;
};

/// Malformed input file or CLI argument.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// CSV parse failure with location diagnostics (1-based row, column).
class CsvError : public ConfigError {
public:
  CsvError(const std::string& msg, std::size_t row, std::size_t col)
      : ConfigError(msg + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
        row_(row), col_(col) {}

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

private:
  std::size_t row_, col_;
};

/// Evaluation referenced an angle variable or parameter with no binding.
class UnboundSymbolError : public Error {
public:
  explicit UnboundSymbolError(const std::string& name)
      : Error("unbound symbol: " + name), name_(name) {}

  const std::string& name() const { return name_; }

private:
  std::string name_;
};

/// A quotient denominator evaluated below the singularity tolerance.
class DivisionNearZeroError : public Error {
public:
  explicit DivisionNearZeroError(double denominator)
      : Error("division by near-zero denominator (" + std::to_string(denominator) + ")"),
        denominator_(denominator) {}

  double denominator() const { return denominator_; }

private:
  double denominator_;
};

/// Kernel back-substitution met a denominator that is identically zero:
/// the geometry itself is degenerate (e.g. a trailer hitched at its own
/// reference wheel).
class StructurallySingularError : public Error {
public:
  StructurallySingularError(int unit, int wheel, const std::string& msg)
      : Error(msg), unit_(unit), wheel_(wheel) {}

  int unit() const { return unit_; }
  int wheel() const { return wheel_; }

private:
  int unit_, wheel_;
};

/// Model evaluation hit a singular configuration; carries the trajectory
/// sample index when raised during integration (-1 otherwise).
class SingularStateError : public Error {
public:
  SingularStateError(const std::string& msg, int unit, int wheel, long sample = -1)
      : Error(msg), unit_(unit), wheel_(wheel), sample_(sample) {}

  int unit() const { return unit_; }
  int wheel() const { return wheel_; }
  long sample() const { return sample_; }
  void set_sample(long s) { sample_ = s; }

private:
  int unit_, wheel_;
  long sample_;
};

/// Integration produced a non-finite state.
class NonFiniteStateError : public Error {
public:
  explicit NonFiniteStateError(long sample)
      : Error("non-finite state at sample " + std::to_string(sample)), sample_(sample) {}

  long sample() const { return sample_; }

private:
  long sample_;
};

}  // namespace ntrailer

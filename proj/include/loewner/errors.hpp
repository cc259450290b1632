#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

/// Base class of every error raised by the library.
class LoewnerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (|z| >= 1, t outside a field's validity window, ...).
class DomainError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

/// Evaluation at a pole of a rational map (Cayley map at 1, its inverse at -1).
class SingularityError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

/// A trajectory reached the containment margin of the unit circle.
class ContainmentError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

/// Step size underflow in the adaptive integrator.
class StiffnessError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

class PreconditionError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

/// A constructor-time validation (e.g. Re p >= 0 on the validation grid) failed.
class ValidationError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

/// Field not tangent to the circle at a claimed contact point.
class TangencyError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

/// Non-finite value produced by a map under evaluation.
class EvaluationError : public LoewnerError {
public:
    using LoewnerError::LoewnerError;
};

/// Malformed scenario configuration; line and column are 1-based, 0 when not tied to a position.
class ConfigError : public LoewnerError {
public:
    ConfigError(const std::string& message, int line = 0, int column = 0)
        : LoewnerError(message), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace loewner

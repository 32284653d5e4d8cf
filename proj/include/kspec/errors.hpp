#pragma once

#include <stdexcept>
#include <string>

namespace kspec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input, or an argument outside its domain.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class DomainError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Matrix is singular to working precision.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Evaluation at (or next to) a pole of a rational function.
class PoleError : public Error {
public:
    using Error::Error;
};

class PoleInRegion : public PoleError {
public:
    using PoleError::PoleError;
};

class PoleMeetsSpectrum : public PoleError {
public:
    using PoleError::PoleError;
};

/// Operator violates ‖A‖ ≤ R(1-margin) or ‖A⁻¹‖ ≤ R(1-margin).
class AdmissibilityError : public Error {
public:
    AdmissibilityError(const std::string& what, double norm, double inv_norm, double radius)
        : Error(what), norm_(norm), inv_norm_(inv_norm), radius_(radius) {}

    double norm() const { return norm_; }
    double inverse_norm() const { return inv_norm_; }
    double radius() const { return radius_; }

private:
    double norm_;
    double inv_norm_;
    double radius_;
};

class QuadratureFailure : public Error {
public:
    QuadratureFailure(const std::string& what, double last_delta)
        : Error(what), last_delta_(last_delta) {}
    double last_delta() const { return last_delta_; }

private:
    double last_delta_;
};

class PositivityError : public Error {
public:
    using Error::Error;
};

class PrecisionError : public Error {
public:
    using Error::Error;
};

/// Operation requires a different classification case than the input has.
class WrongCase : public Error {
public:
    using Error::Error;
};

}  // namespace kspec

#pragma once

#include <stdexcept>
#include <string>

namespace lamptf {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A parameter is outside its admissible set (p = 0, p = -1, bad tolerance, ...).
class ParameterError : public Error {
  public:
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

/// An argument is outside the mathematical domain of the operation (y < 0, w <= 0, ...).
class DomainError : public Error {
  public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Evaluation requested at a singular point (x <= 0, s = 0, a vanishing denominator).
class SingularError : public Error {
  public:
    explicit SingularError(const std::string& msg) : Error(msg) {}
};

/// The shooting bracket search could not certify an undershoot/overshoot pair.
class BracketError : public Error {
  public:
    explicit BracketError(const std::string& msg) : Error(msg) {}
};

} // namespace lamptf

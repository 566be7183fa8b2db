#pragma once

#include <stdexcept>
#include <string>

namespace opuc {

enum class ErrorKind {
  Domain,
  DegenerateMeasure,
  IllConditioned,
  InsufficientCoefficients,
  NotImplemented,
  GappedPhase,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Degree at which a recursion lost positive definiteness.
class IllConditionedError : public Error {
 public:
  IllConditionedError(int degree, const std::string& what)
      : Error(ErrorKind::IllConditioned, what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

// Value in (-inf, +inf] with an explicit +inf marker.
struct Extended {
  enum class Kind { Finite, PlusInfinity };
  Kind kind = Kind::Finite;
  double value = 0.0;

  static Extended finite(double v) { return {Kind::Finite, v}; }
  static Extended infinity() { return {Kind::PlusInfinity, 0.0}; }
  bool is_finite() const { return kind == Kind::Finite; }
};

}  // namespace opuc

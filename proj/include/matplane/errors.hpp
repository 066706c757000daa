#pragma once

#include <stdexcept>
#include <string>

namespace matplane {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class OrientationMismatch : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class InvalidDims : public Error {
 public:
  using Error::Error;
};

/// A gamma factor Gamma(alpha - j/2) sits on a pole; `factor_index` is j.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, int factor_index)
      : Error(what), factor_index_(factor_index) {}
  int factor_index() const noexcept { return factor_index_; }

 private:
  int factor_index_;
};

class ExcludedOrder : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DivergenceSuspected : public Error {
 public:
  using Error::Error;
};

class InjectivityViolated : public Error {
 public:
  using Error::Error;
};

class WrongRegime : public Error {
 public:
  using Error::Error;
};

class BadSpec : public Error {
 public:
  using Error::Error;
};

class Cancelled : public Error {
 public:
  using Error::Error;
};

/// Configuration error; `field()` is the dotted path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace matplane

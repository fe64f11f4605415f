#pragma once

#include <stdexcept>
#include <string>

namespace hybridheat {

/// Broad failure classes; the CLI maps each one onto a process exit code.
enum class ErrorKind {
  Validation,     // bad input data or configuration
  Conditioning,   // ill-conditioned linear algebra, non-convergent numerics
  Certification,  // a computed spectral property failed its check
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Conditioning, what) {}
};

class ConditioningError : public NumericalError {
 public:
  ConditioningError(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class CertificationError : public Error {
 public:
  explicit CertificationError(const std::string& what) : Error(ErrorKind::Certification, what) {}
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return 2;
    case ErrorKind::Conditioning: return 3;
    case ErrorKind::Certification: return 4;
    case ErrorKind::Internal: break;
  }
  return 1;
}

}  // namespace hybridheat

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace avgkernel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or a kernel that does not meet a precondition
/// (asymmetric, non-homogeneous, too few orders, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Function evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numeric failure: non-finite values, failed iterations, degenerate fits.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteIntegrandError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InsufficientDataError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateFitError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The fitted error decay is too slow (slope >= -1) for the tail integral to exist.
class DivergentTailError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Successive oracle grid refinements disagree beyond the requested tolerance.
class ResolutionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonHomogeneousError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownKernelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SyntaxError : public ValidationError {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& message)
      : ValidationError(message), offset_(offset), expected_(std::move(expected)) {}

  /// Byte offset into the source text where parsing stopped.
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace avgkernel

#pragma once

#include <stdexcept>
#include <string>

namespace sconlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, invalid parameters, shape mismatch.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a trustworthy answer.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericError {
 public:
  SingularMatrixError(const std::string& what, double condition_estimate)
      : NumericError(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class NotPositiveSemidefiniteError : public NumericError {
 public:
  NotPositiveSemidefiniteError(const std::string& what, double min_eigenvalue)
      : NumericError(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Sinkhorn ran out of iterations before meeting its marginal tolerance.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : NumericError(what), achieved_(achieved) {}

  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// A simulated trajectory left the finite region.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, long step, long trajectory = -1)
      : Error(what), step_(step), trajectory_(trajectory) {}

  long step() const { return step_; }
  long trajectory() const { return trajectory_; }

 private:
  long step_;
  long trajectory_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sconlab

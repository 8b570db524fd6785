#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace roaflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::Vector2d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: unknown system id, dimension mismatch, bad file.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The trajectory Gram matrix is not positive definite enough to solve for
/// a unique linear fit.
class PersistencyError : public Error {
 public:
  PersistencyError(const std::string& what, double lambda_min, double tolerance)
      : Error(what), lambda_min_(lambda_min), tolerance_(tolerance) {}
  [[nodiscard]] double lambda_min() const noexcept { return lambda_min_; }
  [[nodiscard]] double tolerance() const noexcept { return tolerance_; }

 private:
  double lambda_min_;
  double tolerance_;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, int rank) : Error(what), rank_(rank) {}
  [[nodiscard]] int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

/// Numerical failure: non-finite state, non-finite curve point.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace roaflow

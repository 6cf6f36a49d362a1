#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cskit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (maps to exit code 1 in the CLI).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when an operation needs at least one data point.
class EmptyDatasetError : public Error {
 public:
  EmptyDatasetError() : Error("dataset is empty") {}
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, long expected, long got)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

/// Point cloud stored row-wise (one point per row).
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(RowMatrix points);

  const RowMatrix& points() const { return points_; }
  long size() const { return points_.rows(); }
  long dim() const { return points_.cols(); }
  bool empty() const { return points_.rows() == 0; }
  auto row(long i) const { return points_.row(i); }

 private:
  RowMatrix points_;
};

/// Axis-aligned box [lower, upper].
class Box {
 public:
  Box(Vector lower, Vector upper);
  static Box cube(long d, double lo, double hi);

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  long dim() const { return lower_.size(); }
  double diameter() const { return (upper_ - lower_).norm(); }

  Vector clamp(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }
  bool contains(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

}  // namespace cskit

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace exinf {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A domain type was constructed or called with values that break its invariants.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and a tabulated potential) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A state that must be unit-normalized is not.
class NormalizationError : public Error {
 public:
  NormalizationError(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

/// An iterative solver stopped without meeting its tolerance.
/// `residual()` is the last residual or gradient norm reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The logarithm of a wavefield was requested where the field vanishes.
class NodeError : public Error {
 public:
  NodeError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

}  // namespace exinf

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace yukawa {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Configuration could not be parsed or names an unknown key.
class ConfigError : public Error {
public:
  ConfigError(const std::string& location, const std::string& what)
      : Error(location.empty() ? what : location + ": " + what), location_(location) {}

  const std::string& location() const noexcept { return location_; }

private:
  std::string location_;
};

/// Parameters violate a model constraint at a point where they must be valid.
class InvalidParameters : public Error {
public:
  using Error::Error;
};

/// The truncated Fock basis would exceed the configured hard cap.
class BasisTooLarge : public Error {
public:
  BasisTooLarge(std::size_t size, std::size_t cap)
      : Error("basis size " + std::to_string(size) + " exceeds cap " + std::to_string(cap)),
        size_(size), cap_(cap) {}

  std::size_t size() const noexcept { return size_; }
  std::size_t cap() const noexcept { return cap_; }

private:
  std::size_t size_;
  std::size_t cap_;
};

/// Operator, vector, basis or mode-set shapes disagree.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap or broke down.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double best_residual)
      : Error(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

private:
  double best_residual_;
};

/// The two lowest eigenvalues coincide within the degeneracy threshold.
class DegenerateGroundState : public Error {
public:
  explicit DegenerateGroundState(double gap)
      : Error("ground state is degenerate (gap " + std::to_string(gap) + ")"), gap_(gap) {}

  double gap() const noexcept { return gap_; }

private:
  double gap_;
};

/// Contour quadrature did not settle before the point cap.
class QuadratureError : public Error {
public:
  using Error::Error;
};

/// Neumann series terms stopped decreasing.
class SeriesDivergence : public Error {
public:
  SeriesDivergence(const std::string& what, int order) : Error(what), order_(order) {}

  int order() const noexcept { return order_; }

private:
  int order_;
};

/// The shell-by-shell construction failed at a given scale.
class TrajectoryError : public Error {
public:
  TrajectoryError(int scale, const std::string& what)
      : Error("scale " + std::to_string(scale) + ": " + what), scale_(scale) {}

  int scale() const noexcept { return scale_; }

private:
  int scale_;
};

}  // namespace yukawa

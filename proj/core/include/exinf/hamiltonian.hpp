#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "exinf/grid.hpp"

namespace exinf {

// Units: hbar = 1 and the mass factor is absorbed, so H = -d^2/dq^2 + V(q).
// A plane wave exp(i kappa q) then has energy kappa^2.

struct FreePotential {};

/// V(q) = omega^2 q^2 / 4, giving E_n = omega (n + 1/2).
struct HarmonicPotential {
  double omega;
};

/// V(q) = height on q_lo <= q <= q_hi, zero elsewhere.
struct BarrierPotential {
  double height;
  double q_lo;
  double q_hi;
};

/// One real sample per grid point.
struct TabulatedPotential {
  std::vector<double> values;
};

class Potential {
 public:
  using Kind = std::variant<FreePotential, HarmonicPotential, BarrierPotential, TabulatedPotential>;

  static Potential free() { return Potential(FreePotential{}); }
  static Potential harmonic(double omega);
  static Potential barrier(double height, double q_lo, double q_hi);
  static Potential tabulated(std::vector<double> values);

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;

  /// Potential value at one coordinate. Not defined for tabulated potentials.
  double at(double q) const;

 private:
  explicit Potential(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Real samples of V on the grid. Throws GridMismatch for a tabulated potential
/// whose length differs from the grid.
std::vector<double> potential_samples(const Potential& potential, const Grid& grid);

/// Same samples, as a field.
ScalarField evaluate_potential(const Potential& potential, const Grid& grid);

/// -laplacian(psi) + V psi.
ScalarField apply_hamiltonian(const Potential& potential, const ScalarField& psi);

/// Discrete H with the potential pre-sampled, for repeated application inside solvers.
///
/// `apply` works on raw sample spans of length grid.size() and uses the same
/// stencil as `laplacian`.
class HamiltonianOperator {
 public:
  HamiltonianOperator(const Potential& potential, const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> potential() const noexcept { return v_; }

  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  ScalarField apply(const ScalarField& psi) const;

  /// Diagonal of the matrix restricted to the free samples.
  std::vector<double> diagonal() const;
  /// Constant off-diagonal coupling, -1/h^2.
  double coupling() const noexcept { return -inv_h2_; }

 private:
  Grid grid_;
  std::vector<double> v_;
  double inv_h2_;
};

}  // namespace exinf

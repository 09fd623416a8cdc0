#pragma once

#include <vector>

#include "exinf/grid.hpp"
#include "exinf/hamiltonian.hpp"

namespace exinf {

/// g(q) = k ln psi(q) at a fixed time, with k = hbar/i = -i in natural units.
///
/// The imaginary part of ln psi is the phase unwrapped sequentially from
/// sample 0 (each neighbouring jump taken in (-pi, pi]). On periodic grids
/// the phase may wind: g[n] continues as g[0] + 2 pi winding.
class InfluenceFunction {
 public:
  static constexpr Complex k{0.0, -1.0};

  InfluenceFunction(Grid grid, std::vector<Complex> values, long winding = 0);

  const Grid& grid() const noexcept { return field_.grid(); }
  std::span<const Complex> values() const noexcept { return field_.values(); }
  const ScalarField& field() const noexcept { return field_; }
  long winding() const noexcept { return winding_; }

  /// exp(g / k), the wavefield this influence came from.
  ScalarField wavefield() const;

 private:
  ScalarField field_;
  long winding_;
};

/// Log map of a wavefield. Throws NodeError listing every sample with
/// |psi| < node_eps (dirichlet wall samples included, where psi is pinned to 0).
InfluenceFunction influence_from_wavefield(const ScalarField& psi, double node_eps);

/// p = dg/dq, honouring the winding of periodic influences.
ScalarField momentum_field(const InfluenceFunction& g);

/// Hamilton-Jacobi residual of the separated conservative equation, divided
/// by psi^2: R = k^2 (psi'/psi)^2 + V - E = -(psi'/psi)^2 + V - E.
///
/// For an eigenstate this equals (ln psi)''. Dirichlet wall samples are
/// boundary data: they are exempt from the node check and hold 0. Throws
/// NodeError if any other sample has |psi| < node_eps.
ScalarField pointwise_hj_residual(const ScalarField& psi, double energy, const Potential& potential,
                                  double node_eps);

struct EnergyMoments {
  double mean;
  double variance;
};

/// <H> and <H^2> - <H>^2 of a normalized state under the discrete H.
/// The variance is evaluated as ||H psi - <H> psi||^2, which is the same
/// quantity without the cancellation, so it is never negative.
/// Throws NormalizationError unless integrate(|psi|^2) = 1 within 1e-8.
EnergyMoments energy_moments(const ScalarField& psi, const Potential& potential);

struct ConsistencyReport {
  double assigned_energy;
  double mean_energy;
  double energy_variance;
  double el_residual;  ///< ||H psi - E_assigned psi||
  bool observable;     ///< variance <= tolerance and el_residual <= tolerance
  double tolerance;
};

/// Whether psi can act as an actual influence at the assigned energy: it must
/// be dispersion-free and satisfy the stationary equation at that energy.
ConsistencyReport observability_verdict(const ScalarField& psi, double assigned_energy,
                                        const Potential& potential, double tolerance);

/// exp(-i E t) psi, the solution of the decoupled time equation k dpsi/dt = E psi.
ScalarField time_evolve_phase(const ScalarField& psi, double energy, double t);

}  // namespace exinf

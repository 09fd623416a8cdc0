#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "exinf/eigensolver.hpp"
#include "exinf/grid.hpp"
#include "exinf/hamiltonian.hpp"

namespace exinf {

/// How each iterate moves along the constraint sphere.
enum class VariationalScheme {
  /// x <- normalize(x - step * grad), halving `step` whenever the functional would rise.
  projected_gradient,
  /// Rayleigh-Ritz over span{x, T grad, previous step} with T = (H + c)^-1;
  /// a step is kept only if the functional does not rise.
  locally_optimal,
};

struct VariationalOptions {
  double step = 1e-4;
  std::size_t max_iters = 200000;
  /// Stop when the constrained gradient norm drops to this.
  double tol = 1e-6;
  std::uint64_t seed = 0;
  VariationalScheme scheme = VariationalScheme::locally_optimal;

  void validate() const;
};

/// One accepted iterate of one state.
struct IterationRecord {
  std::size_t state;
  std::size_t iteration;
  double functional;         ///< Rayleigh quotient of the iterate
  double gradient_norm;      ///< norm of the constrained gradient
  double constraint_defect;  ///< | integrate(|psi|^2) - 1 |
  double step;               ///< current step (projected_gradient only)
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// integrate(|dpsi/dq|^2 + V |psi|^2) with the grid's derivative stencil.
/// Throws NormalizationError unless integrate(|psi|^2) = 1 within 1e-8.
double functional_value(const ScalarField& psi, const Potential& potential);

/// The discrete form of the same functional that the minimizer works with:
/// sum over lattice edges of |psi[i+1] - psi[i]|^2 / h plus h sum V |psi|^2,
/// divided by the squared norm. Dirichlet wall samples count as zero. This
/// equals <psi, H psi> / <psi, psi> exactly, without the cancellation of the
/// operator form.
double rayleigh_quotient(const ScalarField& psi, const Potential& potential);

/// Energy recovered as the Lagrange multiplier of the normalization constraint.
/// Throws NormalizationError as functional_value.
double lagrange_multiplier(const ScalarField& psi, const Potential& potential);

/// Gradient of rayleigh_quotient on the unit sphere at normalized psi:
/// 2 (H psi - R psi), walls zeroed. The directional derivative of the quotient
/// along delta is Re <gradient, delta>.
ScalarField constrained_gradient(const ScalarField& psi, const Potential& potential);

/// Lowest `count` states by constrained minimization with deflation. Initial
/// states are seeded pseudo-random fields (real on dirichlet grids, complex on
/// periodic ones). Throws ConvergenceError carrying the last gradient norm if
/// a state does not converge within max_iters.
Spectrum minimize_functional(const Potential& potential, const Grid& grid, std::size_t count,
                             const VariationalOptions& options,
                             const IterationObserver& observer = {});

/// Same, starting from caller-supplied states (one per requested state).
Spectrum minimize_functional(const Potential& potential, std::span<const ScalarField> initial,
                             const VariationalOptions& options,
                             const IterationObserver& observer = {});

}  // namespace exinf

#pragma once

#include <cstddef>
#include <vector>

#include "exinf/grid.hpp"
#include "exinf/hamiltonian.hpp"

namespace exinf {

struct EigenPair {
  double energy;
  ScalarField state;
};

/// Eigenpairs in ascending energy, states unit-normalized under `integrate`.
///
/// Construction checks the grid, the normalization of every state (to 1e-10)
/// and the ordering (ties within 1e-9 relative are allowed so degenerate
/// clusters may carry their own Rayleigh quotients).
class Spectrum {
 public:
  explicit Spectrum(std::vector<EigenPair> pairs);

  std::size_t size() const noexcept { return pairs_.size(); }
  const EigenPair& operator[](std::size_t i) const { return pairs_.at(i); }
  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }
  std::vector<double> energies() const;
  const Grid& grid() const { return pairs_.front().state.grid(); }

 private:
  std::vector<EigenPair> pairs_;
};

struct EigensolverOptions {
  /// Every returned pair must satisfy residual_norm <= this, or ConvergenceError.
  double residual_tolerance = 1e-8;
  /// Relative energy gap below which neighbouring pairs are treated as one
  /// degenerate cluster and given a canonical basis.
  double degeneracy_tolerance = 1e-9;
};

/// Lowest `count` eigenpairs of the discrete H = -d^2/dq^2 + V.
///
/// Dirichlet grids solve the (n-2)x(n-2) tridiagonal problem on the free
/// samples; periodic grids solve the n x n cyclic problem. The result is
/// deterministic: each degenerate cluster is re-expressed in a canonical basis
/// built by projecting grid samples in index order, and each state's first
/// significant component (|x| > 1e-8 max|x|) is made positive.
Spectrum solve_spectrum(const Potential& potential, const Grid& grid, std::size_t count,
                        const EigensolverOptions& options = {});

/// ||H psi - E psi|| over the free samples.
double residual_norm(const EigenPair& pair, const Potential& potential);

/// G[i][j] = <psi_i, psi_j>.
std::vector<std::vector<Complex>> gram_matrix(const Spectrum& spectrum);

/// max_ij |G[i][j] - delta_ij|.
double orthonormality_defect(const Spectrum& spectrum);

}  // namespace exinf

#include "exinf/eigensolver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "exinf/error.hpp"

namespace exinf {

namespace {

// Eigenvectors are Euclidean-orthonormal columns over the free samples.
struct RawEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

RawEigen lowest_tridiagonal(std::vector<double> diag, double coupling, std::size_t count) {
  const auto n = static_cast<lapack_int>(diag.size());
  std::vector<double> off(diag.size(), coupling);
  std::vector<double> w(diag.size());
  std::vector<double> z(diag.size() * count);
  std::vector<lapack_int> support(2 * count);
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1,
                     static_cast<lapack_int>(count), 0.0, &found, w.data(), z.data(), n,
                     support.data());
  if (info != 0 || found != static_cast<lapack_int>(count)) {
    throw ConvergenceError("tridiagonal eigensolver failed (info " + std::to_string(info) + ")",
                           std::numeric_limits<double>::infinity());
  }
  RawEigen out;
  out.values.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t k = 0; k < count; ++k) {
    out.vectors.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(k * diag.size()),
                             z.begin() + static_cast<std::ptrdiff_t>((k + 1) * diag.size()));
  }
  return out;
}

RawEigen lowest_cyclic(const std::vector<double>& diag, double coupling, std::size_t count) {
  const std::size_t n = diag.size();
  std::vector<double> a(n * n, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[c * n + r]; };
  for (std::size_t i = 0; i < n; ++i) {
    at(i, i) = diag[i];
    at(i, (i + 1) % n) = coupling;
    at((i + 1) % n, i) = coupling;
  }
  std::vector<double> w(n);
  std::vector<double> z(n * count);
  std::vector<lapack_int> support(2 * n);
  lapack_int found = 0;
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', ln, a.data(), ln, 0.0, 0.0, 1,
                     static_cast<lapack_int>(count), 0.0, &found, w.data(), z.data(), ln,
                     support.data());
  if (info != 0 || found != static_cast<lapack_int>(count)) {
    throw ConvergenceError("cyclic eigensolver failed (info " + std::to_string(info) + ")",
                           std::numeric_limits<double>::infinity());
  }
  RawEigen out;
  out.values.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t k = 0; k < count; ++k) {
    out.vectors.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(k * n),
                             z.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Replaces the columns of one degenerate cluster by a basis that depends only
// on the spanned subspace: repeatedly take the lowest-index sample whose
// projection onto the not-yet-covered part of the subspace is within a factor
// of ten of the largest such projection.
void canonicalize_cluster(std::vector<std::vector<double>>& vecs, std::size_t first,
                          std::size_t last) {
  const std::size_t d = last - first;
  const std::size_t n = vecs[first].size();
  // Row i of the n x d basis matrix is the coordinate vector of P e_i.
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) rows[i][k] = vecs[first + k][i];
  }
  std::vector<std::vector<double>> accepted;
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<std::vector<double>> residual(n);
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = rows[i];
      for (const auto& c : accepted) {
        const double p = dot(c, residual[i]);
        for (std::size_t j = 0; j < d; ++j) residual[i][j] -= p * c[j];
      }
      largest = std::max(largest, std::sqrt(dot(residual[i], residual[i])));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double r = std::sqrt(dot(residual[i], residual[i]));
      if (r >= 0.1 * largest && r > 0.0) {
        for (double& x : residual[i]) x /= r;
        accepted.push_back(residual[i]);
        break;
      }
    }
  }
  std::vector<std::vector<double>> rotated(d, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = accepted[k][j];
      for (std::size_t i = 0; i < n; ++i) rotated[k][i] += c * vecs[first + j][i];
    }
  }
  for (std::size_t k = 0; k < d; ++k) vecs[first + k] = std::move(rotated[k]);
}

void fix_sign(std::vector<double>& v) {
  double largest = 0.0;
  for (double x : v) largest = std::max(largest, std::abs(x));
  for (double x : v) {
    if (std::abs(x) > 1e-8 * largest) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

// Half-open index ranges of neighbours closer than tol * max(1, |E|), or
// closer than `floor` (the roundoff level of the matrix).
std::vector<std::pair<std::size_t, std::size_t>> clusters(const std::vector<double>& w,
                                                          double tol, double floor) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= w.size(); ++i) {
    if (i == w.size() ||
        std::abs(w[i] - w[i - 1]) > std::max(tol * std::max(1.0, std::abs(w[i])), floor)) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

}  // namespace

Spectrum::Spectrum(std::vector<EigenPair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw InvalidArgument("spectrum: no eigenpairs");
  const Grid& grid = pairs_.front().state.grid();
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    require_same_grid(grid, pairs_[i].state.grid());
    const double dev = std::abs(norm(pairs_[i].state) * norm(pairs_[i].state) - 1.0);
    if (dev > 1e-10) {
      throw NormalizationError("spectrum: state " + std::to_string(i) + " is not normalized", dev);
    }
    if (i > 0) {
      const double a = pairs_[i - 1].energy;
      const double b = pairs_[i].energy;
      if (b < a - 1e-9 * std::max(1.0, std::abs(a))) {
        throw InvalidArgument("spectrum: energies not ascending at index " + std::to_string(i));
      }
    }
  }
}

std::vector<double> Spectrum::energies() const {
  std::vector<double> e;
  e.reserve(pairs_.size());
  for (const auto& p : pairs_) e.push_back(p.energy);
  return e;
}

Spectrum solve_spectrum(const Potential& potential, const Grid& grid, std::size_t count,
                        const EigensolverOptions& options) {
  const std::size_t dof = grid.degrees_of_freedom();
  if (count == 0) throw InvalidArgument("solve_spectrum: need at least one eigenpair");
  if (count > dof) {
    throw InvalidArgument("solve_spectrum: asked for " + std::to_string(count) +
                          " eigenpairs, grid has " + std::to_string(dof) + " free samples");
  }
  const HamiltonianOperator op(potential, grid);
  const std::vector<double> diag = op.diagonal();
  double scale = 0.0;
  for (double d : diag) scale = std::max(scale, std::abs(d) + 2.0 * std::abs(op.coupling()));

  // Ask for a few extra pairs so a degenerate cluster straddling `count` is
  // always complete before it is canonicalized.
  std::size_t wanted = std::min(dof, count + 2);
  RawEigen raw;
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  for (;;) {
    raw = grid.periodic() ? lowest_cyclic(diag, op.coupling(), wanted)
                          : lowest_tridiagonal(diag, op.coupling(), wanted);
    groups = clusters(raw.values, options.degeneracy_tolerance, roundoff);
    const auto& tail = groups.back();
    if (tail.first < count && tail.second == wanted && wanted < dof) {
      wanted = std::min(dof, wanted + 4);
      continue;
    }
    break;
  }

  std::vector<double> energies = raw.values;
  std::vector<Complex> scratch_in(grid.size()), scratch_out(grid.size());
  const std::size_t offset = grid.periodic() ? 0 : 1;
  const double inv_sqrt_h = 1.0 / std::sqrt(grid.spacing());
  auto to_samples = [&](const std::vector<double>& v) {
    std::vector<Complex> s(grid.size(), Complex{});
    for (std::size_t i = 0; i < v.size(); ++i) s[offset + i] = v[i] * inv_sqrt_h;
    return s;
  };

  for (const auto& [first, last] : groups) {
    if (first >= count) break;
    if (last - first < 2) continue;
    canonicalize_cluster(raw.vectors, first, last);
    for (std::size_t k = first; k < last; ++k) {
      scratch_in = to_samples(raw.vectors[k]);
      op.apply(scratch_in, scratch_out);
      double rq = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.is_wall(i)) rq += grid.spacing() * std::real(std::conj(scratch_in[i]) * scratch_out[i]);
      }
      energies[k] = rq;
    }
  }

  std::vector<EigenPair> pairs;
  pairs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    fix_sign(raw.vectors[k]);
    pairs.push_back(EigenPair{energies[k], ScalarField(grid, to_samples(raw.vectors[k]))});
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double r = residual_norm(pairs[k], potential);
    if (!(r <= options.residual_tolerance)) {
      throw ConvergenceError("solve_spectrum: eigenpair " + std::to_string(k) +
                                 " residual exceeds tolerance",
                             r);
    }
  }
  return Spectrum(std::move(pairs));
}

double residual_norm(const EigenPair& pair, const Potential& potential) {
  const ScalarField h_psi = apply_hamiltonian(potential, pair.state);
  return interior_norm(h_psi - Complex(pair.energy) * pair.state);
}

std::vector<std::vector<Complex>> gram_matrix(const Spectrum& spectrum) {
  const std::size_t m = spectrum.size();
  std::vector<std::vector<Complex>> g(m, std::vector<Complex>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      g[i][j] = inner_product(spectrum[i].state, spectrum[j].state);
    }
  }
  return g;
}

double orthonormality_defect(const Spectrum& spectrum) {
  const auto g = gram_matrix(spectrum);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      worst = std::max(worst, std::abs(g[i][j] - Complex(i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace exinf

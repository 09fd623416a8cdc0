#include "exinf/variational.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "exinf/error.hpp"

namespace exinf {

namespace {

using Samples = std::vector<Complex>;

// Inner product over the free samples; every free sample has weight h.
Complex dot(const Grid& grid, const Samples& a, const Samples& b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!grid.is_wall(i)) s += std::conj(a[i]) * b[i];
  }
  return grid.spacing() * s;
}

double squared_norm(const Grid& grid, const Samples& a) { return std::real(dot(grid, a, a)); }

void zero_walls(const Grid& grid, Samples& a) {
  if (!grid.periodic()) {
    a.front() = Complex{};
    a.back() = Complex{};
  }
}

void axpy(Complex alpha, const Samples& x, Samples& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale(double s, Samples& x) {
  for (auto& v : x) v *= s;
}

// Two passes of modified Gram-Schmidt against an orthonormal set.
void project_out(const Grid& grid, const std::vector<Samples>& basis, Samples& x) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) axpy(-dot(grid, b, x), b, x);
  }
}

// Sesquilinear form <a, H b> written as a sum over lattice edges, so that the
// kinetic part never forms the large cancelling stencil terms. Accumulated in
// extended precision: near convergence successive iterates differ in energy by
// less than a double ulp, and the monotone acceptance test must still see it.
using Wide = std::complex<long double>;

Wide energy_form_wide(const Grid& grid, std::span<const double> v, const Samples& a,
                      const Samples& b) {
  const std::size_t n = a.size();
  auto sample = [&](const Samples& s, std::size_t i) {
    return grid.is_wall(i) ? Wide{} : Wide(s[i].real(), s[i].imag());
  };
  Wide kinetic{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    kinetic += std::conj(sample(a, i + 1) - sample(a, i)) * (sample(b, i + 1) - sample(b, i));
  }
  if (grid.periodic()) kinetic += std::conj(sample(a, 0) - sample(a, n - 1)) * (sample(b, 0) - sample(b, n - 1));
  Wide pot{};
  for (std::size_t i = 0; i < n; ++i) {
    if (!grid.is_wall(i)) pot += static_cast<long double>(v[i]) * std::conj(sample(a, i)) * sample(b, i);
  }
  const auto h = static_cast<long double>(grid.spacing());
  return kinetic / h + h * pot;
}

Complex energy_form(const Grid& grid, std::span<const double> v, const Samples& a,
                    const Samples& b) {
  const Wide w = energy_form_wide(grid, v, a, b);
  return Complex(static_cast<double>(w.real()), static_cast<double>(w.imag()));
}

long double quotient_wide(const Grid& grid, std::span<const double> v, const Samples& x) {
  long double n2 = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!grid.is_wall(i)) n2 += static_cast<long double>(std::norm(x[i]));
  }
  return energy_form_wide(grid, v, x, x).real() / (static_cast<long double>(grid.spacing()) * n2);
}

double quotient(const Grid& grid, std::span<const double> v, const Samples& x) {
  return static_cast<double>(quotient_wide(grid, v, x));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Samples random_samples(const Grid& grid, std::mt19937_64& rng) {
  Samples x(grid.size());
  for (auto& s : x) {
    const double re = 2.0 * uniform01(rng) - 1.0;
    const double im = grid.periodic() ? 2.0 * uniform01(rng) - 1.0 : 0.0;
    s = Complex(re, im);
  }
  zero_walls(grid, x);
  return x;
}

void fix_phase(Samples& x) {
  double largest = 0.0;
  for (const auto& s : x) largest = std::max(largest, std::abs(s));
  for (const auto& s : x) {
    if (std::abs(s) > 1e-8 * largest) {
      const Complex phase = std::conj(s) / std::abs(s);
      for (auto& y : x) y *= phase;
      return;
    }
  }
}

// Lowest eigenvector of a small Hermitian matrix (row-major, k x k).
std::vector<Complex> lowest_ritz_vector(std::vector<Complex> a, std::size_t k) {
  std::vector<double> w(k);
  const lapack_int info =
      LAPACKE_zheev(LAPACK_ROW_MAJOR, 'V', 'U', static_cast<lapack_int>(k),
                    reinterpret_cast<lapack_complex_double*>(a.data()),
                    static_cast<lapack_int>(k), w.data());
  if (info != 0) throw ConvergenceError("Rayleigh-Ritz step failed", std::nan(""));
  std::vector<Complex> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = a[i * k];
  return c;
}

// Applies (H + c)^-1 with c chosen so that H + c >= 1; a tridiagonal solve on
// Dirichlet grids and Sherman-Morrison around one on rings.
class Preconditioner {
 public:
  Preconditioner(const Grid& grid, std::span<const double> v) : grid_(grid) {
    const std::size_t n = grid.size();
    first_ = grid.periodic() ? 0 : 1;
    m_ = grid.periodic() ? n : n - 2;
    const double h2 = grid.spacing() * grid.spacing();
    double vmin = v[first_];
    for (std::size_t i = 0; i < m_; ++i) vmin = std::min(vmin, v[first_ + i]);
    const double c = 1.0 - vmin;
    d_.resize(m_);
    e_.assign(m_ > 0 ? m_ - 1 : 0, -1.0 / h2);
    for (std::size_t i = 0; i < m_; ++i) d_[i] = 2.0 / h2 + v[first_ + i] + c;
    if (grid.periodic()) {
      corner_ = -1.0 / h2;
      gamma_ = -d_[0];
      d_[0] -= gamma_;
      d_[m_ - 1] -= corner_ * corner_ / gamma_;
    }
    if (LAPACKE_dpttrf(static_cast<lapack_int>(m_), d_.data(), e_.data()) != 0) {
      throw ConvergenceError("variational: preconditioner factorization failed", std::nan(""));
    }
    if (grid.periodic()) {
      z_.assign(m_, 0.0);
      z_[0] = gamma_;
      z_[m_ - 1] = corner_;
      solve(z_.data(), 1);
    }
  }

  Samples apply(const Samples& r) const {
    std::vector<double> b(2 * m_);
    for (std::size_t i = 0; i < m_; ++i) {
      b[i] = r[first_ + i].real();
      b[m_ + i] = r[first_ + i].imag();
    }
    solve(b.data(), 2);
    if (grid_.periodic()) {
      const double tail = corner_ / gamma_;
      const double denom = 1.0 + z_[0] + tail * z_[m_ - 1];
      for (std::size_t col = 0; col < 2; ++col) {
        double* y = b.data() + col * m_;
        const double f = (y[0] + tail * y[m_ - 1]) / denom;
        for (std::size_t i = 0; i < m_; ++i) y[i] -= f * z_[i];
      }
    }
    Samples out(r.size(), Complex{});
    for (std::size_t i = 0; i < m_; ++i) out[first_ + i] = Complex(b[i], b[m_ + i]);
    return out;
  }

 private:
  void solve(double* b, lapack_int columns) const {
    LAPACKE_dpttrs(LAPACK_COL_MAJOR, static_cast<lapack_int>(m_), columns, d_.data(), e_.data(), b,
                   static_cast<lapack_int>(m_));
  }

  Grid grid_;
  std::size_t first_ = 0;
  std::size_t m_ = 0;
  std::vector<double> d_;
  std::vector<double> e_;
  double corner_ = 0.0;
  double gamma_ = 1.0;
  std::vector<double> z_;
};

class Minimizer {
 public:
  Minimizer(const Potential& potential, const Grid& grid, const VariationalOptions& options,
            const IterationObserver& observer)
      : grid_(grid), op_(potential, grid), options_(options), observer_(observer),
        preconditioner_(grid, op_.potential()) {}

  // Drives x to the lowest state orthogonal to `locked`; returns its energy.
  double run(std::size_t index, Samples& x, const std::vector<Samples>& locked) {
    const auto v = op_.potential();
    zero_walls(grid_, x);
    project_out(grid_, locked, x);
    normalize(x);
    double energy = quotient(grid_, v, x);
    double step = options_.step;
    Samples previous;  // last update direction, locally_optimal only
    Samples hx(x.size());
    double gradient_norm = 0.0;

    for (std::size_t it = 0;; ++it) {
      op_.apply(x, hx);
      Samples g = hx;
      axpy(-energy, x, g);
      zero_walls(grid_, g);
      project_out(grid_, locked, g);
      axpy(-dot(grid_, x, g), x, g);
      gradient_norm = 2.0 * std::sqrt(squared_norm(grid_, g));
      if (observer_) {
        observer_(IterationRecord{index, it, energy, gradient_norm,
                                  std::abs(squared_norm(grid_, x) - 1.0), step});
      }
      if (gradient_norm <= options_.tol) return energy;
      if (it >= options_.max_iters) break;

      bool moved = false;
      if (options_.scheme == VariationalScheme::projected_gradient) {
        moved = gradient_step(x, g, locked, energy, step);
      } else {
        moved = ritz_step(x, g, previous, locked, energy);
        if (!moved && !previous.empty()) {
          previous.clear();
          moved = ritz_step(x, g, previous, locked, energy);
        }
      }
      if (!moved) break;
    }
    throw ConvergenceError("variational state " + std::to_string(index) +
                               " did not converge; gradient norm " +
                               std::to_string(gradient_norm),
                           gradient_norm);
  }

 private:
  void normalize(Samples& x) const {
    const double n2 = squared_norm(grid_, x);
    if (!(n2 > 0.0)) throw InvalidArgument("variational: initial state vanishes after deflation");
    scale(1.0 / std::sqrt(n2), x);
  }

  bool gradient_step(Samples& x, const Samples& g, const std::vector<Samples>& locked,
                     double& energy, double& step) const {
    const auto v = op_.potential();
    for (int halvings = 0; halvings < 200; ++halvings) {
      Samples trial = x;
      axpy(-2.0 * step, g, trial);
      project_out(grid_, locked, trial);
      normalize(trial);
      const double e = quotient(grid_, v, trial);
      if (e <= energy) {
        x = std::move(trial);
        energy = e;
        return true;
      }
      step *= 0.5;
    }
    return false;
  }

  bool ritz_step(Samples& x, const Samples& g, Samples& previous,
                 const std::vector<Samples>& locked, double& energy) const {
    const auto v = op_.potential();
    std::vector<Samples> basis{x};
    auto extend = [&](Samples d) {
      const double before = std::sqrt(squared_norm(grid_, d));
      if (!(before > 0.0)) return;
      scale(1.0 / before, d);
      project_out(grid_, locked, d);
      project_out(grid_, basis, d);
      const double after = std::sqrt(squared_norm(grid_, d));
      if (after < 1e-10) return;
      scale(1.0 / after, d);
      basis.push_back(std::move(d));
    };
    extend(preconditioner_.apply(g));
    if (!previous.empty()) extend(previous);
    if (basis.size() == 1) return false;

    const std::size_t k = basis.size();
    std::vector<Complex> a(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        a[i * k + j] = energy_form(grid_, v, basis[i], basis[j]);
        a[j * k + i] = std::conj(a[i * k + j]);
      }
    }
    const auto c = lowest_ritz_vector(std::move(a), k);
    Samples update(x.size(), Complex{});
    for (std::size_t j = 1; j < k; ++j) axpy(c[j], basis[j], update);
    Samples trial = update;
    axpy(c[0], x, trial);
    project_out(grid_, locked, trial);
    normalize(trial);
    const double e = quotient(grid_, v, trial);
    if (!(e <= energy)) return false;
    x = std::move(trial);
    energy = e;
    previous = std::move(update);
    return true;
  }

  Grid grid_;
  HamiltonianOperator op_;
  VariationalOptions options_;
  const IterationObserver& observer_;
  Preconditioner preconditioner_;
};

void require_normalized(const ScalarField& psi, const char* who) {
  const double n = norm(psi);
  const double dev = std::abs(n * n - 1.0);
  if (dev > 1e-8) {
    throw NormalizationError(std::string(who) + ": state is not normalized (|norm^2 - 1| = " +
                                 std::to_string(dev) + ")",
                             dev);
  }
}

Spectrum minimize_from(const Potential& potential, const Grid& grid, std::vector<Samples> states,
                       const VariationalOptions& options, const IterationObserver& observer) {
  options.validate();
  if (states.size() > grid.degrees_of_freedom()) {
    throw InvalidArgument("minimize_functional: asked for " + std::to_string(states.size()) +
                          " states, grid has " + std::to_string(grid.degrees_of_freedom()) +
                          " free samples");
  }
  Minimizer minimizer(potential, grid, options, observer);
  std::vector<Samples> locked;
  std::vector<EigenPair> pairs;
  for (std::size_t j = 0; j < states.size(); ++j) {
    Samples x = std::move(states[j]);
    const double energy = minimizer.run(j, x, locked);
    fix_phase(x);
    locked.push_back(x);
    pairs.push_back(EigenPair{energy, ScalarField(grid, std::move(x))});
  }
  return Spectrum(std::move(pairs));
}

}  // namespace

void VariationalOptions::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("variational: step must be > 0");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidArgument("variational: tol must be > 0");
  if (max_iters < 1) throw InvalidArgument("variational: max_iters must be >= 1");
}

double functional_value(const ScalarField& psi, const Potential& potential) {
  require_normalized(psi, "functional_value");
  const ScalarField dpsi = derivative(psi);
  const std::vector<double> v = potential_samples(potential, psi.grid());
  std::vector<Complex> density(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) density[i] = std::norm(dpsi[i]) + v[i] * std::norm(psi[i]);
  return std::real(integrate(ScalarField(psi.grid(), std::move(density))));
}

double rayleigh_quotient(const ScalarField& psi, const Potential& potential) {
  const std::vector<double> v = potential_samples(potential, psi.grid());
  const Samples x(psi.values().begin(), psi.values().end());
  return quotient(psi.grid(), v, x);
}

double lagrange_multiplier(const ScalarField& psi, const Potential& potential) {
  require_normalized(psi, "lagrange_multiplier");
  return rayleigh_quotient(psi, potential);
}

ScalarField constrained_gradient(const ScalarField& psi, const Potential& potential) {
  const Grid& grid = psi.grid();
  const HamiltonianOperator op(potential, grid);
  Samples x(psi.values().begin(), psi.values().end());
  zero_walls(grid, x);
  const double r = quotient(grid, op.potential(), x);
  Samples g(x.size());
  op.apply(x, g);
  axpy(-r, x, g);
  zero_walls(grid, g);
  scale(2.0, g);
  return ScalarField(grid, std::move(g));
}

Spectrum minimize_functional(const Potential& potential, const Grid& grid, std::size_t count,
                             const VariationalOptions& options, const IterationObserver& observer) {
  if (count == 0) throw InvalidArgument("minimize_functional: need at least one state");
  if (count > grid.degrees_of_freedom()) {
    throw InvalidArgument("minimize_functional: asked for " + std::to_string(count) +
                          " states, grid has " + std::to_string(grid.degrees_of_freedom()) +
                          " free samples");
  }
  std::mt19937_64 rng(options.seed);
  std::vector<Samples> states;
  for (std::size_t j = 0; j < count; ++j) states.push_back(random_samples(grid, rng));
  return minimize_from(potential, grid, std::move(states), options, observer);
}

Spectrum minimize_functional(const Potential& potential, std::span<const ScalarField> initial,
                             const VariationalOptions& options, const IterationObserver& observer) {
  if (initial.empty()) throw InvalidArgument("minimize_functional: need at least one state");
  const Grid& grid = initial.front().grid();
  std::vector<Samples> states;
  for (const auto& f : initial) {
    require_same_grid(grid, f.grid());
    states.emplace_back(f.values().begin(), f.values().end());
  }
  return minimize_from(potential, grid, std::move(states), options, observer);
}

}  // namespace exinf

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace exinf {

using Complex = std::complex<double>;

/// How samples beyond the ends of a Grid are treated.
///
/// `dirichlet`: both end samples sit on hard walls and every sample outside
/// the grid is zero. `periodic`: the grid is a ring, sample n wraps to sample 0
/// and q_max itself is not a sample.
enum class Boundary { dirichlet, periodic };

/// Uniform one-dimensional lattice over [q_min, q_max].
class Grid {
 public:
  Grid(double q_min, double q_max, std::size_t n, Boundary boundary = Boundary::dirichlet);

  double q_min() const noexcept { return q_min_; }
  double q_max() const noexcept { return q_max_; }
  std::size_t size() const noexcept { return n_; }
  Boundary boundary() const noexcept { return boundary_; }
  bool periodic() const noexcept { return boundary_ == Boundary::periodic; }

  /// (q_max - q_min)/(n - 1) for dirichlet, (q_max - q_min)/n for periodic.
  double spacing() const noexcept { return h_; }
  double point(std::size_t i) const noexcept { return q_min_ + static_cast<double>(i) * h_; }
  std::vector<double> points() const;

  /// Quadrature weight of sample i: trapezoid for dirichlet, rectangle for periodic.
  double weight(std::size_t i) const noexcept;

  /// True for the two end samples of a dirichlet grid.
  bool is_wall(std::size_t i) const noexcept {
    return boundary_ == Boundary::dirichlet && (i == 0 || i + 1 == n_);
  }

  /// Number of free samples: n - 2 for dirichlet (walls pinned), n for periodic.
  std::size_t degrees_of_freedom() const noexcept {
    return periodic() ? n_ : n_ - 2;
  }

  bool operator==(const Grid&) const = default;

 private:
  double q_min_;
  double q_max_;
  std::size_t n_;
  Boundary boundary_;
  double h_;
};

/// Complex samples of a function on a Grid. Immutable; every value finite.
class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<Complex> values);

  template <typename Fn>
  static ScalarField sample(const Grid& grid, Fn&& fn) {
    std::vector<Complex> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = Complex(fn(grid.point(i)));
    return ScalarField(grid, std::move(values));
  }
  static ScalarField constant(const Grid& grid, Complex value);
  static ScalarField real(const Grid& grid, std::span<const double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const Complex> values() const noexcept { return values_; }
  Complex operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Largest |Im| over the samples.
  double max_imag() const noexcept;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(Complex s, const ScalarField& f);

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

/// Pointwise product a(q) b(q).
ScalarField multiply(const ScalarField& a, const ScalarField& b);

/// First derivative with second-order stencils.
///
/// Interior points use central differences; dirichlet ends use one-sided
/// second-order differences; periodic grids wrap around. For periodic grids
/// `period_offset` lets the field be quasi-periodic, f[i + n] = f[i] + offset,
/// which is what an unwrapped phase with nonzero winding looks like.
ScalarField derivative(const ScalarField& f, Complex period_offset = {});

/// Three-point second difference. Dirichlet exterior ghosts are zero.
ScalarField laplacian(const ScalarField& f);

/// Trapezoid (dirichlet) or rectangle (periodic) quadrature.
Complex integrate(const ScalarField& f);

/// integrate(conj(f) g). Throws GridMismatch if the grids differ.
Complex inner_product(const ScalarField& f, const ScalarField& g);

/// sqrt(integrate(|f|^2)).
double norm(const ScalarField& f);

/// Norm over the free samples only; dirichlet wall samples are skipped.
/// This is the norm in which operator residuals are measured.
double interior_norm(const ScalarField& f);

/// Inner product over the free samples only.
Complex interior_inner_product(const ScalarField& f, const ScalarField& g);

/// f / norm(f). Throws InvalidArgument for a zero field.
ScalarField normalized(const ScalarField& f);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace exinf

#include "exinf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exinf/error.hpp"

namespace exinf {

Grid::Grid(double q_min, double q_max, std::size_t n, Boundary boundary)
    : q_min_(q_min), q_max_(q_max), n_(n), boundary_(boundary), h_(0.0) {
  if (!std::isfinite(q_min) || !std::isfinite(q_max)) {
    throw InvalidArgument("grid: bounds must be finite");
  }
  if (n < 3) throw InvalidArgument("grid: need at least 3 samples, got " + std::to_string(n));
  if (!(q_max > q_min)) throw InvalidArgument("grid: q_max must exceed q_min");
  const double span = q_max - q_min;
  h_ = periodic() ? span / static_cast<double>(n) : span / static_cast<double>(n - 1);
  if (!(h_ > 0.0)) throw InvalidArgument("grid: spacing underflows to zero");
}

std::vector<double> Grid::points() const {
  std::vector<double> q(n_);
  for (std::size_t i = 0; i < n_; ++i) q[i] = point(i);
  return q;
}

double Grid::weight(std::size_t i) const noexcept {
  if (boundary_ == Boundary::dirichlet && (i == 0 || i + 1 == n_)) return 0.5 * h_;
  return h_;
}

ScalarField::ScalarField(Grid grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw GridMismatch("field: " + std::to_string(values_.size()) + " values for a grid of " +
                       std::to_string(grid_.size()) + " samples");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
      throw InvalidArgument("field: non-finite value at index " + std::to_string(i));
    }
  }
}

ScalarField ScalarField::constant(const Grid& grid, Complex value) {
  return ScalarField(grid, std::vector<Complex>(grid.size(), value));
}

ScalarField ScalarField::real(const Grid& grid, std::span<const double> values) {
  return ScalarField(grid, std::vector<Complex>(values.begin(), values.end()));
}

double ScalarField::max_imag() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw GridMismatch("fields live on different grids");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid_, b.grid_);
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] + b.values_[i];
  return ScalarField(a.grid_, std::move(out));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid_, b.grid_);
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] - b.values_[i];
  return ScalarField(a.grid_, std::move(out));
}

ScalarField operator*(Complex s, const ScalarField& f) {
  std::vector<Complex> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * f.values_[i];
  return ScalarField(f.grid_, std::move(out));
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return ScalarField(a.grid(), std::move(out));
}

ScalarField derivative(const ScalarField& f, Complex period_offset) {
  const Grid& g = f.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  std::vector<Complex> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  if (g.periodic()) {
    out[0] = (f[1] - (f[n - 1] - period_offset)) / (2.0 * h);
    out[n - 1] = ((f[0] + period_offset) - f[n - 2]) / (2.0 * h);
  } else {
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  }
  return ScalarField(g, std::move(out));
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  const std::size_t n = g.size();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<Complex> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  if (g.periodic()) {
    out[0] = (f[n - 1] - 2.0 * f[0] + f[1]) * inv_h2;
    out[n - 1] = (f[n - 2] - 2.0 * f[n - 1] + f[0]) * inv_h2;
  } else {
    out[0] = (-2.0 * f[0] + f[1]) * inv_h2;
    out[n - 1] = (f[n - 2] - 2.0 * f[n - 1]) * inv_h2;
  }
  return ScalarField(g, std::move(out));
}

Complex integrate(const ScalarField& f) {
  const Grid& g = f.grid();
  Complex sum{};
  for (std::size_t i = 0; i < g.size(); ++i) sum += g.weight(i) * f[i];
  return sum;
}

Complex inner_product(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  const Grid& grid = f.grid();
  Complex sum{};
  for (std::size_t i = 0; i < grid.size(); ++i) sum += grid.weight(i) * std::conj(f[i]) * g[i];
  return sum;
}

double norm(const ScalarField& f) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) sum += g.weight(i) * std::norm(f[i]);
  return std::sqrt(sum);
}

double interior_norm(const ScalarField& f) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.is_wall(i)) sum += g.weight(i) * std::norm(f[i]);
  }
  return std::sqrt(sum);
}

Complex interior_inner_product(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  const Grid& grid = f.grid();
  Complex sum{};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.is_wall(i)) sum += grid.weight(i) * std::conj(f[i]) * g[i];
  }
  return sum;
}

ScalarField normalized(const ScalarField& f) {
  const double nrm = norm(f);
  if (!(nrm > 0.0)) throw InvalidArgument("cannot normalize a zero field");
  return Complex(1.0 / nrm) * f;
}

}  // namespace exinf

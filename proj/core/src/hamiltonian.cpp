#include "exinf/hamiltonian.hpp"

#include <cmath>
#include <string>

#include "exinf/error.hpp"

namespace exinf {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

Potential Potential::harmonic(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidArgument("harmonic potential: omega must be positive");
  }
  return Potential(HarmonicPotential{omega});
}

Potential Potential::barrier(double height, double q_lo, double q_hi) {
  if (!std::isfinite(height) || !std::isfinite(q_lo) || !std::isfinite(q_hi)) {
    throw InvalidArgument("barrier potential: parameters must be finite");
  }
  if (!(q_lo < q_hi)) throw InvalidArgument("barrier potential: q_lo must be below q_hi");
  return Potential(BarrierPotential{height, q_lo, q_hi});
}

Potential Potential::tabulated(std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidArgument("tabulated potential: non-finite value at index " + std::to_string(i));
    }
  }
  return Potential(TabulatedPotential{std::move(values)});
}

std::string Potential::name() const {
  return std::visit(overloaded{[](const FreePotential&) { return std::string("free"); },
                               [](const HarmonicPotential&) { return std::string("harmonic"); },
                               [](const BarrierPotential&) { return std::string("barrier"); },
                               [](const TabulatedPotential&) { return std::string("tabulated"); }},
                    kind_);
}

double Potential::at(double q) const {
  return std::visit(
      overloaded{[](const FreePotential&) { return 0.0; },
                 [q](const HarmonicPotential& p) { return 0.25 * p.omega * p.omega * q * q; },
                 [q](const BarrierPotential& p) {
                   return (q >= p.q_lo && q <= p.q_hi) ? p.height : 0.0;
                 },
                 [](const TabulatedPotential&) -> double {
                   throw InvalidArgument("tabulated potential has no closed form");
                 }},
      kind_);
}

std::vector<double> potential_samples(const Potential& potential, const Grid& grid) {
  if (const auto* tab = std::get_if<TabulatedPotential>(&potential.kind())) {
    if (tab->values.size() != grid.size()) {
      throw GridMismatch("tabulated potential has " + std::to_string(tab->values.size()) +
                         " samples, grid has " + std::to_string(grid.size()));
    }
    return tab->values;
  }
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = potential.at(grid.point(i));
  return v;
}

ScalarField evaluate_potential(const Potential& potential, const Grid& grid) {
  return ScalarField::real(grid, potential_samples(potential, grid));
}

ScalarField apply_hamiltonian(const Potential& potential, const ScalarField& psi) {
  return HamiltonianOperator(potential, psi.grid()).apply(psi);
}

HamiltonianOperator::HamiltonianOperator(const Potential& potential, const Grid& grid)
    : grid_(grid),
      v_(potential_samples(potential, grid)),
      inv_h2_(1.0 / (grid.spacing() * grid.spacing())) {}

void HamiltonianOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t n = grid_.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (2.0 * in[i] - in[i - 1] - in[i + 1]) * inv_h2_ + v_[i] * in[i];
  }
  const Complex left = grid_.periodic() ? in[n - 1] : Complex{};
  const Complex right = grid_.periodic() ? in[0] : Complex{};
  out[0] = (2.0 * in[0] - left - in[1]) * inv_h2_ + v_[0] * in[0];
  out[n - 1] = (2.0 * in[n - 1] - in[n - 2] - right) * inv_h2_ + v_[n - 1] * in[n - 1];
}

ScalarField HamiltonianOperator::apply(const ScalarField& psi) const {
  require_same_grid(grid_, psi.grid());
  std::vector<Complex> out(grid_.size());
  apply(psi.values(), out);
  return ScalarField(grid_, std::move(out));
}

std::vector<double> HamiltonianOperator::diagonal() const {
  const std::size_t first = grid_.periodic() ? 0 : 1;
  const std::size_t count = grid_.degrees_of_freedom();
  std::vector<double> d(count);
  for (std::size_t k = 0; k < count; ++k) d[k] = 2.0 * inv_h2_ + v_[first + k];
  return d;
}

}  // namespace exinf

#include "exinf/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "exinf/error.hpp"
#include "exinf/variational.hpp"

namespace exinf {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(what) + " must be positive");
  }
}

std::string list_indices(const std::vector<std::size_t>& idx) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(idx.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) s += (i ? ", " : "") + std::to_string(idx[i]);
  if (idx.size() > shown) s += ", ...";
  return s;
}

}  // namespace

InfluenceFunction::InfluenceFunction(Grid grid, std::vector<Complex> values, long winding)
    : field_(std::move(grid), std::move(values)), winding_(winding) {
  if (winding_ != 0 && !field_.grid().periodic()) {
    throw InvalidArgument("influence: only periodic grids carry a winding number");
  }
}

ScalarField InfluenceFunction::wavefield() const {
  std::vector<Complex> psi(field_.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::exp(field_[i] / k);
  return ScalarField(field_.grid(), std::move(psi));
}

InfluenceFunction influence_from_wavefield(const ScalarField& psi, double node_eps) {
  require_positive(node_eps, "node_eps");
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (std::abs(psi[i]) < node_eps) nodes.push_back(i);
  }
  if (!nodes.empty()) {
    throw NodeError("ln psi is undefined at nodes (indices " + list_indices(nodes) + ")",
                    std::move(nodes));
  }
  const std::size_t n = psi.size();
  std::vector<double> phase(n);
  phase[0] = std::arg(psi[0]);
  for (std::size_t i = 1; i < n; ++i) {
    phase[i] = phase[i - 1] + std::arg(psi[i] * std::conj(psi[i - 1]));
  }
  long winding = 0;
  if (psi.grid().periodic()) {
    const double closing = phase[n - 1] + std::arg(psi[0] * std::conj(psi[n - 1]));
    winding = std::lround((closing - phase[0]) / (2.0 * std::numbers::pi));
  }
  std::vector<Complex> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = InfluenceFunction::k * Complex(std::log(std::abs(psi[i])), phase[i]);
  }
  return InfluenceFunction(psi.grid(), std::move(g), winding);
}

ScalarField momentum_field(const InfluenceFunction& g) {
  // k * (i * 2 pi w) = 2 pi w
  const Complex offset = InfluenceFunction::k * Complex(0.0, 2.0 * std::numbers::pi *
                                                                 static_cast<double>(g.winding()));
  return derivative(g.field(), offset);
}

ScalarField pointwise_hj_residual(const ScalarField& psi, double energy, const Potential& potential,
                                  double node_eps) {
  require_positive(node_eps, "node_eps");
  const Grid& grid = psi.grid();
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!grid.is_wall(i) && std::abs(psi[i]) < node_eps) nodes.push_back(i);
  }
  if (!nodes.empty()) {
    throw NodeError("Hamilton-Jacobi residual is undefined at nodes (indices " +
                        list_indices(nodes) + ")",
                    std::move(nodes));
  }
  const ScalarField dpsi = derivative(psi);
  const std::vector<double> v = potential_samples(potential, grid);
  std::vector<Complex> r(psi.size(), Complex{});
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (grid.is_wall(i)) continue;
    const Complex log_slope = dpsi[i] / psi[i];
    r[i] = InfluenceFunction::k * InfluenceFunction::k * log_slope * log_slope + v[i] - energy;
  }
  return ScalarField(grid, std::move(r));
}

EnergyMoments energy_moments(const ScalarField& psi, const Potential& potential) {
  const double nrm = norm(psi);
  const double dev = std::abs(nrm * nrm - 1.0);
  if (dev > 1e-8) {
    throw NormalizationError("energy_moments: state is not normalized", dev);
  }
  const ScalarField unit = Complex(1.0 / nrm) * psi;
  const double mean = rayleigh_quotient(unit, potential);
  const ScalarField h_psi = apply_hamiltonian(potential, unit);
  const double spread = interior_norm(h_psi - Complex(mean) * unit);
  return EnergyMoments{mean, spread * spread};
}

ConsistencyReport observability_verdict(const ScalarField& psi, double assigned_energy,
                                        const Potential& potential, double tolerance) {
  require_positive(tolerance, "tolerance");
  const EnergyMoments moments = energy_moments(psi, potential);
  const ScalarField h_psi = apply_hamiltonian(potential, psi);
  const double residual = interior_norm(h_psi - Complex(assigned_energy) * psi);
  ConsistencyReport report{};
  report.assigned_energy = assigned_energy;
  report.mean_energy = moments.mean;
  report.energy_variance = moments.variance;
  report.el_residual = residual;
  report.tolerance = tolerance;
  report.observable = moments.variance <= tolerance && residual <= tolerance;
  return report;
}

ScalarField time_evolve_phase(const ScalarField& psi, double energy, double t) {
  return std::exp(Complex(0.0, -energy * t)) * psi;
}

}  // namespace exinf

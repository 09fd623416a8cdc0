#include <cmath>
#include <random>

#include "doctest.h"
#include "exinf/eigensolver.hpp"
#include "exinf/error.hpp"
#include "oracles.hpp"

using namespace exinf;

TEST_CASE("box spectrum") {
  const Grid g(0.0, oracle::pi, 2001);
  const Spectrum s = solve_spectrum(Potential::free(), g, 4);
  REQUIRE(s.size() == 4);
  for (int k = 1; k <= 4; ++k) {
    const double e = s[k - 1].energy;
    CHECK(std::abs(e - k * k) <= 0.005 * k * k);
    // The discrete well is solvable in closed form as well.
    const double exact = oracle::discrete_box_energy(k, oracle::pi, g.spacing());
    CHECK(std::abs(e - exact) <= 1e-9 * exact);
    CHECK(residual_norm(s[k - 1], Potential::free()) <= 1e-8);
  }
  CHECK(orthonormality_defect(s) <= 1e-8);
}

TEST_CASE("harmonic spectrum") {
  const Grid g(-10.0, 10.0, 2001);
  const Potential v = Potential::harmonic(2.0);
  const Spectrum s = solve_spectrum(v, g, 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(s[k].energy - (2 * k + 1)) <= 0.005 * (2 * k + 1));
    CHECK(residual_norm(s[k], v) <= 1e-8);
  }
  CHECK(orthonormality_defect(s) <= 1e-8);
}

TEST_CASE("ring spectrum is degenerate") {
  const Grid g(0.0, 2.0 * oracle::pi, 256, Boundary::periodic);
  const Spectrum s = solve_spectrum(Potential::free(), g, 5);
  CHECK(std::abs(s[0].energy) < 1e-10);
  const double e1 = oracle::discrete_plane_wave_energy(1.0, g.spacing());
  const double e2 = oracle::discrete_plane_wave_energy(2.0, g.spacing());
  CHECK(std::abs(s[1].energy - s[2].energy) <= 1e-6 * s[1].energy);
  CHECK(std::abs(s[1].energy - e1) <= 1e-10);
  CHECK(std::abs(s[2].energy - e1) <= 1e-10);
  CHECK(std::abs(s[3].energy - e2) <= 1e-10);
  CHECK(std::abs(s[4].energy - e2) <= 1e-10);
  CHECK(std::abs(s[1].energy - 1.0) < 1e-3);
  CHECK(orthonormality_defect(s) <= 1e-8);
  for (const auto& p : s) CHECK(residual_norm(p, Potential::free()) <= 1e-8);

  SUBCASE("canonical basis inside the degenerate pair") {
    // Projecting sample 0 (q = 0) onto span{cos q, sin q} gives cos q first.
    const auto c = normalized(ScalarField::sample(g, [](double q) { return std::cos(q); }));
    const auto sn = normalized(ScalarField::sample(g, [](double q) { return std::sin(q); }));
    CHECK(std::abs(inner_product(c, s[1].state) - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(sn, s[2].state) - 1.0) < 1e-10);
  }
  SUBCASE("a cluster cut by the requested count keeps the same representative") {
    const Spectrum two = solve_spectrum(Potential::free(), g, 2);
    CHECK(std::abs(inner_product(two[1].state, s[1].state) - 1.0) < 1e-10);
  }
}

TEST_CASE("solve_spectrum errors") {
  const Grid g(0.0, 1.0, 10);
  CHECK_THROWS_AS(solve_spectrum(Potential::free(), g, 9), InvalidArgument);
  CHECK_THROWS_AS(solve_spectrum(Potential::free(), g, 0), InvalidArgument);
  CHECK_NOTHROW(solve_spectrum(Potential::free(), g, 8));
  const Grid r(0.0, 1.0, 10, Boundary::periodic);
  CHECK_NOTHROW(solve_spectrum(Potential::free(), r, 10));
  CHECK_THROWS_AS(solve_spectrum(Potential::free(), r, 11), InvalidArgument);

  // An impossible residual cap surfaces as a convergence error with the residual attached.
  EigensolverOptions strict;
  strict.residual_tolerance = 1e-30;
  try {
    solve_spectrum(Potential::harmonic(1.0), Grid(-5.0, 5.0, 401), 2, strict);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 1e-30);
    CHECK(e.residual() < 1e-8);
  }
}

TEST_CASE("solve_spectrum is deterministic and sign-fixed") {
  const Grid g(-6.0, 6.0, 601);
  const Potential v = Potential::barrier(4.0, -0.5, 0.5);
  const Spectrum a = solve_spectrum(v, g, 4);
  const Spectrum b = solve_spectrum(v, g, 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(a[k].energy == b[k].energy);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[k].state[i] == b[k].state[i]);
    double largest = 0.0;
    for (auto x : a[k].state.values()) largest = std::max(largest, std::abs(x));
    for (auto x : a[k].state.values()) {
      if (std::abs(x) > 1e-8 * largest) {
        CHECK(x.real() > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("residual_norm") {
  const Grid g(0.0, oracle::pi, 801);
  const Spectrum s = solve_spectrum(Potential::free(), g, 2);
  const double delta = 0.37;
  const EigenPair shifted{s[1].energy + delta, s[1].state};
  CHECK(std::abs(residual_norm(shifted, Potential::free()) - delta) <= 1e-8);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid h(-5.0, 5.0, 201);
  std::vector<Complex> v(h.size());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) v[i] = u(rng);
  const auto psi = normalized(ScalarField(h, v));
  CHECK(residual_norm(EigenPair{1.0, psi}, Potential::harmonic(2.0)) > 0.0);
}

TEST_CASE("box energies converge at second order") {
  double prev = 0.0;
  for (std::size_t n : {101u, 201u, 401u, 801u}) {
    const Grid g(0.0, oracle::pi, n);
    const Spectrum s = solve_spectrum(Potential::free(), g, 3);
    const double err = std::abs(s[2].energy - 9.0);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("spectrum invariants are enforced") {
  const Grid g(0.0, 1.0, 11);
  const auto unit = normalized(ScalarField::constant(g, 1.0));
  CHECK_THROWS_AS(Spectrum({EigenPair{1.0, 2.0 * unit}}), NormalizationError);
  CHECK_THROWS_AS(Spectrum({EigenPair{2.0, unit}, EigenPair{1.0, unit}}), InvalidArgument);
  CHECK_THROWS_AS(Spectrum(std::vector<EigenPair>{}), InvalidArgument);
}

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "exinf/error.hpp"
#include "exinf/grid.hpp"
#include "oracles.hpp"

using namespace exinf;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b, std::size_t from, std::size_t to) {
  double m = 0.0;
  for (std::size_t i = from; i < to; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ScalarField random_field(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return ScalarField::sample(grid, [&](double) { return Complex(u(rng), u(rng)); });
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid(0.0, 1.0, 2), InvalidArgument);
  CHECK_THROWS_AS(Grid(1.0, 1.0, 10), InvalidArgument);
  CHECK_THROWS_AS(Grid(2.0, 1.0, 10), InvalidArgument);

  const Grid d(0.0, 1.0, 11);
  CHECK(d.spacing() == doctest::Approx(0.1));
  CHECK(d.point(10) == doctest::Approx(1.0));
  CHECK(d.degrees_of_freedom() == 9);
  CHECK(d.is_wall(0));
  CHECK(d.is_wall(10));
  CHECK_FALSE(d.is_wall(5));

  const Grid p(0.0, 1.0, 10, Boundary::periodic);
  CHECK(p.spacing() == doctest::Approx(0.1));
  CHECK(p.degrees_of_freedom() == 10);
  CHECK_FALSE(p.is_wall(0));
}

TEST_CASE("scalar field rejects bad samples") {
  const Grid g(0.0, 1.0, 5);
  CHECK_THROWS_AS(ScalarField(g, std::vector<Complex>(4)), GridMismatch);
  std::vector<Complex> v(5);
  v[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScalarField(g, v), InvalidArgument);
}

TEST_CASE("derivative") {
  SUBCASE("constant") {
    const Grid g(-1.0, 2.0, 31);
    const auto d = derivative(ScalarField::constant(g, 1.0));
    for (auto v : d.values()) CHECK(std::abs(v) == doctest::Approx(0.0));
  }
  SUBCASE("linear is exact, edges included") {
    const Grid g(-1.0, 2.0, 31);
    const auto d = derivative(ScalarField::sample(g, [](double q) { return q; }));
    for (auto v : d.values()) CHECK(std::abs(v - 1.0) < 1e-12);
  }
  SUBCASE("sin on a periodic ring") {
    // Central difference: sin(h)/h cos q, error <= h^2/6.
    const Grid g(0.0, 2.0 * oracle::pi, 1000, Boundary::periodic);
    const double h = g.spacing();
    const auto d = derivative(ScalarField::sample(g, [](double q) { return std::sin(q); }));
    const auto exact = ScalarField::sample(g, [](double q) { return std::cos(q); });
    CHECK(max_abs_diff(d, exact, 0, g.size()) <= h * h / 6.0);
  }
  SUBCASE("second-order convergence") {
    double prev = 0.0;
    for (std::size_t n : {101u, 201u, 401u}) {
      const Grid g(0.0, 2.0, n);
      const auto d = derivative(ScalarField::sample(g, [](double q) { return std::exp(q); }));
      const auto exact = ScalarField::sample(g, [](double q) { return std::exp(q); });
      const double err = max_abs_diff(d, exact, 0, n);
      if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
      prev = err;
    }
  }
}

TEST_CASE("laplacian") {
  const Grid g(-1.0, 3.0, 41);
  SUBCASE("linear interior") {
    const auto l = laplacian(ScalarField::sample(g, [](double q) { return q; }));
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(std::abs(l[i]) < 1e-10);
  }
  SUBCASE("quadratic interior is exactly 2") {
    const auto l = laplacian(ScalarField::sample(g, [](double q) { return q * q; }));
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(std::abs(l[i] - 2.0) < 1e-10);
  }
  SUBCASE("dirichlet ghosts are zero") {
    const auto l = laplacian(ScalarField::constant(g, 1.0));
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    CHECK(std::abs(l[0] + inv_h2) < 1e-9);
    CHECK(std::abs(l[g.size() - 1] + inv_h2) < 1e-9);
  }
  SUBCASE("sin on a ring, error <= h^2/12") {
    const Grid r(0.0, 2.0 * oracle::pi, 500, Boundary::periodic);
    const double h = r.spacing();
    const auto l = laplacian(ScalarField::sample(r, [](double q) { return std::sin(q); }));
    const auto exact = ScalarField::sample(r, [](double q) { return -std::sin(q); });
    CHECK(max_abs_diff(l, exact, 0, r.size()) <= h * h / 12.0 + 1e-12);
  }
  SUBCASE("second-order convergence") {
    double prev = 0.0;
    for (std::size_t n : {64u, 128u, 256u}) {
      const Grid r(0.0, 2.0 * oracle::pi, n, Boundary::periodic);
      const auto l = laplacian(ScalarField::sample(r, [](double q) { return std::cos(3 * q); }));
      const auto exact = ScalarField::sample(r, [](double q) { return -9.0 * std::cos(3 * q); });
      const double err = max_abs_diff(l, exact, 0, n);
      if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
      prev = err;
    }
  }
}

TEST_CASE("integrate") {
  CHECK(std::abs(integrate(ScalarField::constant(Grid(0.0, 1.0, 17), 1.0)) - 1.0) < 1e-14);
  CHECK(std::abs(integrate(ScalarField::constant(Grid(0.0, 1.0, 16, Boundary::periodic), 1.0)) -
                 1.0) < 1e-14);

  // Trapezoid error for sin^2 on [0, pi] is bounded by (pi/12) h^2 max|f''| = (pi/6) h^2.
  const Grid g(0.0, oracle::pi, 201);
  const double h = g.spacing();
  const auto s2 = ScalarField::sample(g, [](double q) { return std::sin(q) * std::sin(q); });
  CHECK(std::abs(integrate(s2) - oracle::pi / 2.0) <= oracle::pi / 6.0 * h * h);

  SUBCASE("additive under splitting at a shared sample") {
    const Grid whole(0.0, 2.0, 201);
    const Grid left(0.0, 1.0, 101);
    const Grid right(1.0, 2.0, 101);
    auto f = [](double q) { return std::exp(-q) * std::cos(5 * q); };
    const Complex sum = integrate(ScalarField::sample(left, f)) +
                        integrate(ScalarField::sample(right, f));
    CHECK(std::abs(integrate(ScalarField::sample(whole, f)) - sum) < 1e-13);
  }
}

TEST_CASE("inner product") {
  std::mt19937_64 rng(11);
  const Grid g(0.0, 2.0, 64);
  const auto f = random_field(g, rng);
  const auto h = random_field(g, rng);
  const Complex ff = inner_product(f, f);
  CHECK(std::abs(ff.imag()) < 1e-14);
  CHECK(ff.real() > 0.0);
  CHECK(std::abs(inner_product(f, h) - std::conj(inner_product(h, f))) < 1e-14);

  const Complex a(0.3, -1.2);
  const Complex b(-2.0, 0.5);
  const auto k = random_field(g, rng);
  CHECK(std::abs(inner_product(f, a * h + b * k) -
                 (a * inner_product(f, h) + b * inner_product(f, k))) < 1e-12);
  CHECK(std::abs(inner_product(a * h, f) - std::conj(a) * inner_product(h, f)) < 1e-12);

  CHECK_THROWS_AS(inner_product(f, ScalarField::constant(Grid(0.0, 2.0, 65), 1.0)), GridMismatch);

  SUBCASE("analytic box modes are orthogonal") {
    const Grid box(0.0, oracle::pi, 2001);
    const auto m1 = ScalarField::sample(box, [](double q) { return oracle::box_mode(1, q, 0.0, oracle::pi); });
    const auto m2 = ScalarField::sample(box, [](double q) { return oracle::box_mode(2, q, 0.0, oracle::pi); });
    CHECK(std::abs(inner_product(m1, m2)) <= 1e-8);
  }
}

TEST_CASE("derivative and laplacian are linear") {
  std::mt19937_64 rng(5);
  for (Boundary b : {Boundary::dirichlet, Boundary::periodic}) {
    const Grid g(-1.0, 1.0, 50, b);
    const auto f = random_field(g, rng);
    const auto h = random_field(g, rng);
    const Complex a(1.5, 0.25);
    const Complex c(-0.5, 2.0);
    const auto lhs_d = derivative(a * f + c * h);
    const auto rhs_d = a * derivative(f) + c * derivative(h);
    const auto lhs_l = laplacian(a * f + c * h);
    const auto rhs_l = a * laplacian(f) + c * laplacian(h);
    CHECK(max_abs_diff(lhs_d, rhs_d, 0, g.size()) < 1e-10);
    CHECK(max_abs_diff(lhs_l, rhs_l, 0, g.size()) < 1e-8);
  }
}

TEST_CASE("quasi-periodic derivative") {
  // f = q on a ring of length L jumps by L across the seam.
  const Grid g(0.0, 3.0, 30, Boundary::periodic);
  const auto d = derivative(ScalarField::sample(g, [](double q) { return q; }), 3.0);
  for (auto v : d.values()) CHECK(std::abs(v - 1.0) < 1e-12);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "fbh/coefficients.hpp"
#include "fbh/grid.hpp"
#include "fbh/norms.hpp"

using namespace fbh;

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid(2, 1.0, 0.3), ConfigInvalid);   // R/h not integer
  CHECK_THROWS_AS(Grid(2, 1.0, 0.25), ConfigInvalid);  // R/h < 8
  Grid g(2, 1.0, 1.0 / 16);
  CHECK(g.nodes_per_axis == 33);
  CHECK(g.cells_per_axis == 32);
  auto p = g.node_pos(g.node_index(16, 16));
  CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("avg_lp_norm constant field") {
  Grid g(2, 1.0, 1.0 / 32);
  GridFunction u = GridFunction::sample(g, [](double, double) { return -3.5; });
  for (double p : {1.0, 2.0, 4.0})
    CHECK(avg_lp_norm(u, Ball(0.75), p) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("avg_lp_norm of x1 on the unit ball") {
  // (1/pi) int_{B_1} x1^2 = 1/4, so the L2 average is 0.5
  Grid g(2, 1.0, 1.0 / 64);
  GridFunction u = GridFunction::sample(g, [](double x, double) { return x; });
  CHECK(avg_lp_norm(u, Ball(1.0), 2.0) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("avg_lp_norm half-half cell field") {
  Grid g(2, 1.0, 1.0 / 16);
  Arr f = Arr::Zero(g.cell_count());
  for (int c = 0; c < g.cell_count() / 2; ++c) f[c] = 1.0;
  const double v = avg_lp_norm_cells(g, f, Ball({0.0, 0.0}, 10.0), 2.0);
  CHECK(v == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("norm scaling is exact") {
  Grid g(2, 1.0, 1.0 / 16);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  GridFunction u(g);
  for (int i = 0; i < g.node_count(); ++i) u.values[i] = U(rng);
  const double base = avg_lp_norm(u, Ball(0.9), 3.0);
  GridFunction v(g, Vec(-4.25 * u.values));
  CHECK(avg_lp_norm(v, Ball(0.9), 3.0) == doctest::Approx(4.25 * base).epsilon(1e-13));
}

TEST_CASE("nested-ball inequality on random fields") {
  Grid g(2, 1.0, 1.0 / 32);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    GridFunction u(g);
    for (int i = 0; i < g.node_count(); ++i) u.values[i] = U(rng);
    const double rho = 0.4, r = 0.9;
    const double lhs = avg_lp_norm(u, Ball(rho), 2.0);
    const double rhs = std::pow(r / rho, 1.0) * avg_lp_norm(u, Ball(r), 2.0);
    CHECK(lhs <= rhs * (1.0 + 5.0 * g.h));
  }
}

TEST_CASE("empty ball throws") {
  Grid g(2, 1.0, 1.0 / 16);
  GridFunction u(g);
  CHECK_THROWS_AS(avg_lp_norm(u, Ball({5.0, 5.0}, 0.01), 2.0), EmptyBall);
}

TEST_CASE("cell gradient exact on affine functions") {
  Grid g(2, 1.0, 1.0 / 16);
  GridFunction u =
      GridFunction::sample(g, [](double x, double y) { return 2 * x - 3 * y + 1; });
  auto grad = cell_gradient(u);
  for (int c = 0; c < g.cell_count(); ++c) {
    CHECK(grad(c, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(grad(c, 1) == doctest::Approx(-3.0).epsilon(1e-12));
  }
}

TEST_CASE("periodic extension exactness") {
  auto f = make_laminate_field(2, 64);
  for (double x : {0.13, 0.49, 0.77})
    for (double y : {0.21, 0.68}) {
      CHECK(f.a_at(x, y)(0, 0) == f.a_at(x + 1.0, y)(0, 0));
      CHECK(f.a_at(x, y)(1, 1) == f.a_at(x - 2.0, y + 3.0)(1, 1));
      CHECK(f.qplus_at(x, y) == f.qplus_at(x + 1.0, y - 1.0));
    }
}

TEST_CASE("normalize_coefficients") {
  SUBCASE("already normalized is unchanged") {
    auto f = make_constant_field(2, 32);
    auto n = normalize_coefficients(f);
    CHECK(n.qplus[0] == f.qplus[0]);
    CHECK(n.mean_qplus_sq() - n.mean_qminus_sq() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Q+=2, Q-=1 rescales to 4/3 and 1/3") {
    auto f = CoefficientField::sampled(
        2, 3.0, 32, [](double, double) { return Mat2(Mat2::Identity()); },
        [](double, double) { return 2.0; }, [](double, double) { return 1.0; });
    auto n = normalize_coefficients(f);
    CHECK(n.qplus[0] * n.qplus[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(n.qminus[0] * n.qminus[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("zero gap throws") {
    auto f = CoefficientField::sampled(
        2, 2.0, 32, [](double, double) { return Mat2(Mat2::Identity()); },
        [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
    CHECK_THROWS_AS(normalize_coefficients(f), NonPositiveGap);
  }
  SUBCASE("leaving the ellipticity window throws") {
    auto f = CoefficientField::sampled(
        2, 1.3, 32, [](double, double) { return Mat2(Mat2::Identity()); },
        [](double, double) { return 1.2; }, [](double, double) { return 1.0; });
    // gap = 0.44, rescaling inflates Q+ past Lambda = 1.3
    CHECK_THROWS_AS(normalize_coefficients(f), EllipticityViolation);
  }
}

TEST_CASE("binary round trip and csv export") {
  Grid g(2, 1.0, 1.0 / 8);
  GridFunction u = GridFunction::sample(g, [](double x, double y) { return x * y + 0.25; });
  const std::string path = "field_roundtrip.fbh";
  write_gridfunction(u, path);
  GridFunction v = read_gridfunction(path);
  CHECK(v.grid.same_layout(g));
  CHECK((v.values - u.values).cwiseAbs().maxCoeff() == 0.0);
  write_gridfunction_csv(u, "field_roundtrip.csv");
  std::remove(path.c_str());
  std::remove("field_roundtrip.csv");
}

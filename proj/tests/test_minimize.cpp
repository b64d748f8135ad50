#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fbh/minimize.hpp"
#include "fbh/norms.hpp"
#include "fbh/twoplane.hpp"

using namespace fbh;

TEST_CASE("energy breakdown on constant states") {
  Grid g(2, 1.0, 1.0 / 16);
  auto med = constant_medium(g, Mat2::Identity(), 2.0, 1.0);
  SUBCASE("u = 1") {
    GridFunction u = GridFunction::sample(g, [](double, double) { return 1.0; });
    auto e = energy(g, med, u, all_cells(g));
    CHECK(e.dirichlet == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(e.volume_plus == doctest::Approx(2.0 * 4.0).epsilon(1e-12));
    CHECK(e.volume_minus == 0.0);
    CHECK(e.total == doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("u = -1") {
    GridFunction u = GridFunction::sample(g, [](double, double) { return -1.0; });
    auto e = energy(g, med, u, all_cells(g));
    CHECK(e.volume_plus == 0.0);
    CHECK(e.volume_minus == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("energy of the axis two-plane is exact") {
  // PHI_1(x2) on [-1,1]^2 with q+^2 = 2, q-^2 = 1: dirichlet 6, volume 6
  Grid g(2, 1.0, 1.0 / 16);
  auto med = constant_medium(g, Mat2::Identity(), 2.0, 1.0);
  GridFunction u = GridFunction::sample(g, [](double, double y) { return phi(1.0, y); });
  auto e = energy(g, med, u, all_cells(g));
  CHECK(e.dirichlet == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(e.volume_plus + e.volume_minus == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(e.total == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("1d free boundary matches the scalar oracle") {
  // boundary data u(-1) = -1, u(1) = 1; closed-form reduced energy
  // E(s) = 2/(1-s^2) + 3 - s, minimized by ternary search (the oracle).
  auto E = [](double s) { return 2.0 / (1.0 - s * s) + 3.0 - s; };
  double lo = -0.9, hi = 0.9;
  for (int k = 0; k < 200; ++k) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (E(m1) <= E(m2))
      hi = m2;
    else
      lo = m1;
  }
  const double s_star = 0.5 * (lo + hi);
  CHECK(s_star == doctest::Approx(0.2251).epsilon(2e-3));

  Grid g(1, 1.0, 1.0 / 64);
  auto field = make_constant_field(1, 32);
  auto med = sample_medium(g, field);
  GridFunction data = GridFunction::sample(g, [](double x, double) { return x; });
  MinimizeConfig cfg;
  cfg.max_outer = 60;
  cfg.descent_steps = 400;
  auto res = minimize(g, med, data, all_cells(g), cfg);

  // locate the discrete free boundary by the sign-change edge
  double crossing = -2.0;
  for (int i = 0; i + 1 < g.nodes_per_axis; ++i) {
    const double a = res.u.values[i], b = res.u.values[i + 1];
    if ((a > 0.0) != (b > 0.0)) {
      const auto pa = g.node_pos(i);
      crossing = pa[0] + g.h * (0.0 - a) / (b - a);
      break;
    }
  }
  INFO("crossing = " << crossing << " s* = " << s_star
                     << " converged = " << res.converged);
  CHECK(std::abs(crossing - s_star) <= 0.01);

  // trace is nonincreasing and boundary data is exact
  for (size_t k = 1; k < res.trace.size(); ++k) CHECK(res.trace[k] <= res.trace[k - 1] + 1e-15);
  CHECK(res.u.values[0] == -1.0);
  CHECK(res.u.values[g.nodes_per_axis - 1] == 1.0);
}

TEST_CASE("axis-aligned two-plane data reproduces the two-plane minimizer") {
  Grid g(2, 2.0, 1.0 / 16);
  auto field = make_constant_field(2, 32);
  auto med = sample_medium(g, field);
  const double alpha = 1.0;
  GridFunction data = GridFunction::sample(g, [&](double, double y) { return phi(alpha, y); });
  MinimizeConfig cfg;
  auto res = minimize(g, med, data, cells_in_ball(g, Ball(2.0)), cfg);
  double worst = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    auto p = g.node_pos(i);
    if (p[0] * p[0] + p[1] * p[1] <= 4.0)
      worst = std::max(worst, std::abs(res.u.values[i] - phi(alpha, p[1])));
  }
  CHECK(worst <= 0.5 * g.h);
  auto fit = measure_flatness(res.u, Ball(1.0));
  CHECK(fit.delta <= 2.0 * g.h);
}

TEST_CASE("single-phase data reduces to the harmonic replacement") {
  Grid g(2, 1.0, 1.0 / 16);
  auto field = make_constant_field(2, 32);
  auto med = sample_medium(g, field);
  GridFunction data =
      GridFunction::sample(g, [](double x, double y) { return 3.0 + 0.3 * x * y; });
  auto cells = all_cells(g);
  MinimizeConfig cfg;
  auto res = minimize(g, med, data, cells, cfg);
  auto repl = harmonic_replacement(g, med, data, cells);
  CHECK((res.u.values - repl.values).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("minimizer beats random admissible competitors") {
  Grid g(2, 1.0, 1.0 / 16);
  auto field = make_constant_field(2, 32);
  auto med = sample_medium(g, field);
  GridFunction data = GridFunction::sample(g, [](double, double y) { return phi(0.8, y); });
  auto cells = all_cells(g);
  MinimizeConfig cfg;
  auto res = minimize(g, med, data, cells, cfg);
  auto F = DirichletForm::box(g, med, cells);
  auto nodes = classify_region_nodes(g, F.cell_mask);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  const double E0 = energy(g, med, res.u, cells).total;
  for (int k = 0; k < 20; ++k) {
    GridFunction w = res.u;
    for (int i = 0; i < g.node_count(); ++i)
      if (nodes.interior[i]) w.values[i] += U(rng);
    CHECK(energy(g, med, w, cells).total >= E0 - 1e-9);
  }
}

TEST_CASE("interior elliptic residual vanishes away from the zero set") {
  Grid g(2, 2.0, 1.0 / 16);
  auto field = make_constant_field(2, 32);
  auto med = sample_medium(g, field);
  GridFunction data = GridFunction::sample(g, [](double, double y) { return phi(1.0, y); });
  auto cells = all_cells(g);
  MinimizeConfig cfg;
  auto res = minimize(g, med, data, cells, cfg);
  auto F = DirichletForm::box(g, med, cells);
  const Vec Av = F.apply(res.u.values);
  const Arr diag = F.diagonal();
  double worst = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    if (g.is_box_boundary_node(i)) continue;
    const auto p = g.node_pos(i);
    if (std::abs(p[1]) <= 2.5 * g.h) continue;  // skip the free-boundary band
    worst = std::max(worst, std::abs(Av[i]) / diag[i]);
  }
  CHECK(worst <= 1e-6 * (1.0 + avg_gradient_l2(res.u, Ball(1.5))));
}

TEST_CASE("harmonic_gap") {
  Grid g(2, 1.0, 1.0 / 16);
  auto field = make_constant_field(2, 32);
  auto med = sample_medium(g, field);
  SUBCASE("a-harmonic input has zero gap") {
    GridFunction u = GridFunction::sample(g, [](double x, double y) { return x * y; });
    auto rep = harmonic_gap(g, med, field.lambda, u, Ball(0.9));
    CHECK(rep.gap <= 1e-8);
  }
  SUBCASE("constructed perturbation is measured exactly") {
    GridFunction base = GridFunction::sample(g, [](double x, double y) { return x + y; });
    auto cells = cells_in_ball(g, Ball(0.9));
    auto F = DirichletForm::box(g, med, cells);
    auto nodes = classify_region_nodes(g, F.cell_mask);
    GridFunction u = base;
    GridFunction phi_only(g);
    for (int i = 0; i < g.node_count(); ++i) {
      if (!nodes.interior[i]) continue;
      const auto p = g.node_pos(i);
      const double b = std::cos(3.0 * p[0]) * std::sin(2.0 * p[1]) * 0.1;
      u.values[i] += b;
      phi_only.values[i] = b;
    }
    auto rep = harmonic_gap(g, med, field.lambda, u, Ball(0.9));
    const double expected = avg_lp_norm_cells(g, gradient_magnitude(phi_only), Ball(0.9), 2.0);
    CHECK(rep.gap == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("boundary strip energy") {
  Grid g(2, 2.0, 1.0 / 16);
  const double alpha = 1.0;
  GridFunction u = GridFunction::sample(g, [&](double, double y) { return phi(alpha, y); });
  const Ball b(2.0);
  SUBCASE("tiny strip is empty") { CHECK(boundary_strip_energy(u, 1e-6, b) == 0.0); }
  SUBCASE("monotone in s") {
    double prev = 0.0;
    for (double s : {0.125, 0.25, 0.5, 1.0}) {
      const double v = boundary_strip_energy(u, s, b);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
  SUBCASE("slab value is linear in s") {
    // strip is a slab of width s(1/alpha+ + 1/alpha-); integrand is constant
    const double v1 = boundary_strip_energy(u, 0.25, b);
    const double v2 = boundary_strip_energy(u, 0.5, b);
    CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(0.15));
  }
  SUBCASE("precondition") {
    CHECK_THROWS_AS(boundary_strip_energy(u, 1.5, b), PreconditionViolated);
  }
}

TEST_CASE("energy difference inequalities") {
  Grid g(1, 1.0, 1.0 / 128);
  SUBCASE("explicit sub pair v0 = x^4, v1 = x^2, mu = 2") {
    GridFunction v0 = GridFunction::sample(g, [](double x, double) { return x * x * x * x; });
    GridFunction v1 = GridFunction::sample(g, [](double x, double) { return x * x; });
    auto rep = energy_difference_check(v0, v1, 2.0, all_cells(g));
    CHECK(rep.sub_applicable);
    CHECK(rep.sub_holds);
    // quadrature oracle: lhs = 32/7 - 8/3 = 40/21, rhs = 4*(2/3 - 2/5) = 16/15
    CHECK(rep.lhs == doctest::Approx(40.0 / 21.0).epsilon(0.05));
    CHECK(rep.rhs_sub == doctest::Approx(16.0 / 15.0).epsilon(0.05));
  }
  SUBCASE("explicit super pair v0 = 2-2x^2, v1 = 2-x^2-x^4, mu = 2") {
    GridFunction v0 =
        GridFunction::sample(g, [](double x, double) { return 2.0 - 2.0 * x * x; });
    GridFunction v1 = GridFunction::sample(
        g, [](double x, double) { return 2.0 - x * x - x * x * x * x; });
    auto rep = energy_difference_check(v0, v1, 2.0, all_cells(g));
    CHECK(rep.super_applicable);
    CHECK(rep.super_holds);
    // oracle: lhs = 32/3 - (8/3 + 32/5 + 32/7), rhs = -16/15
    CHECK(rep.lhs == doctest::Approx(32.0 / 3.0 - (8.0 / 3.0 + 32.0 / 5.0 + 32.0 / 7.0))
                         .epsilon(0.05));
    CHECK(rep.rhs_super == doctest::Approx(-16.0 / 15.0).epsilon(0.05));
  }
  SUBCASE("preconditions are named") {
    GridFunction v0 = GridFunction::sample(g, [](double x, double) { return x * x; });
    GridFunction v1 = GridFunction::sample(g, [](double x, double) { return x * x * x * x; });
    CHECK_THROWS_AS(energy_difference_check(v0, v1, 1.0, all_cells(g)),
                    PreconditionViolated);  // v0 <= v1 fails
    GridFunction w0 = GridFunction::sample(g, [](double x, double) { return -x * x; });
    GridFunction w1 = GridFunction::sample(g, [](double x, double) { return 1.0 - x * x; });
    CHECK_THROWS_AS(energy_difference_check(w0, w1, 1.0, all_cells(g)),
                    PreconditionViolated);  // boundary layer mismatch
  }
  SUBCASE("randomized admissible pairs all pass") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> Uc(0.5, 2.0), Ub(-0.5, 0.5), Ua(0.1, 0.5);
    int sub_count = 0, super_count = 0;
    for (int k = 0; k < 100; ++k) {
      const double c = Uc(rng), b = Ub(rng), A = Ua(rng);
      const bool sub = k % 2 == 0;
      const int kk = 1 + static_cast<int>(3.0 * Ua(rng) * 10.0) % 4;
      auto bump = [&](double x) {
        const double base = (1.0 - x * x) * (1.0 - x * x);
        return A * base * (1.0 + 0.5 * std::sin(kk * M_PI * x));
      };
      GridFunction v0(g), v1(g);
      for (int i = 0; i < g.node_count(); ++i) {
        const double x = g.node_pos(i)[0];
        if (sub) {
          const double vv1 = c * x * x + b * x + std::abs(b) + 0.2;
          v1.values[i] = vv1;
          v0.values[i] = vv1 - bump(x);
        } else {
          const double vv0 = -c * x * x + b * x + c + std::abs(b) + 0.2;
          v0.values[i] = vv0;
          v1.values[i] = vv0 + bump(x);
        }
      }
      auto rep = energy_difference_check(v0, v1, 1.0, all_cells(g));
      if (sub) {
        CHECK(rep.sub_applicable);
        CHECK(rep.sub_holds);
        ++sub_count;
      } else {
        CHECK(rep.super_applicable);
        CHECK(rep.super_holds);
        ++super_count;
      }
    }
    CHECK(sub_count == 50);
    CHECK(super_count == 50);
  }
}

#include "fbh/minimize.hpp"

#include <algorithm>
#include <cmath>

#include "fbh/norms.hpp"
#include "fbh/solver.hpp"
#include "fbh/twoplane.hpp"

namespace fbh {

EnergyBreakdown energy(const Grid& g, const MediumOnGrid& med, const GridFunction& u,
                       const std::vector<int>& cells) {
  if (cells.empty()) throw PreconditionViolated("energy: empty region");
  const DirichletForm F = DirichletForm::box(g, med, cells);
  EnergyBreakdown e;
  e.dirichlet = F.energy(u.values);
  const Arr cv = cell_values(u);
  const double hd = g.cell_volume();
  for (int c : cells) {
    if (cv[c] > 0.0)
      e.volume_plus += med.qp2[c] * hd;
    else
      e.volume_minus += med.qm2[c] * hd;
  }
  e.total = e.dirichlet + e.volume_plus + e.volume_minus;
  return e;
}

namespace {

struct EnergyEval {
  const Grid& g;
  const MediumOnGrid& med;
  const DirichletForm& F;
  const std::vector<int>& cells;

  double exact(const Vec& u) const {
    double vol = 0.0;
    const double hd = g.cell_volume();
    const int n = g.nodes_per_axis;
    const int m = g.cells_per_axis;
    for (int c : cells) {
      double cv;
      if (g.dim == 1) {
        cv = 0.5 * (u[c] + u[c + 1]);
      } else {
        const int a = (c % m) + n * (c / m);
        cv = 0.25 * (u[a] + u[a + 1] + u[a + n] + u[a + n + 1]);
      }
      vol += (cv > 0.0 ? med.qp2[c] : med.qm2[c]) * hd;
    }
    return F.energy(u) + vol;
  }

  // Gradient of the smoothed energy (indicator -> 0.5(1+tanh(u/eps))).
  Vec smoothed_gradient(const Vec& u, double eps) const {
    Vec grad = 2.0 * F.apply(u);
    const double hd = g.cell_volume();
    const double corner_w = g.dim == 1 ? 0.5 : 0.25;
    const int n = g.nodes_per_axis, m = g.cells_per_axis;
    for (int c : cells) {
      int corners[4];
      int cnt;
      double cv;
      if (g.dim == 1) {
        corners[0] = c;
        corners[1] = c + 1;
        cnt = 2;
        cv = 0.5 * (u[c] + u[c + 1]);
      } else {
        const int a = (c % m) + n * (c / m);
        corners[0] = a;
        corners[1] = a + 1;
        corners[2] = a + n;
        corners[3] = a + n + 1;
        cnt = 4;
        cv = 0.25 * (u[a] + u[a + 1] + u[a + n] + u[a + n + 1]);
      }
      const double th = std::tanh(cv / eps);
      const double hprime = 0.5 * (1.0 - th * th) / eps;
      const double w = (med.qp2[c] - med.qm2[c]) * hprime * hd * corner_w;
      for (int k = 0; k < cnt; ++k) grad[corners[k]] += w;
    }
    return grad;
  }
};

}  // namespace

MinimizerResult minimize(const Grid& g, const MediumOnGrid& med,
                         const GridFunction& boundary_data,
                         const std::vector<int>& region_cells, const MinimizeConfig& cfg) {
  if (region_cells.empty()) throw PreconditionViolated("minimize: empty region");
  const DirichletForm F = DirichletForm::box(g, med, region_cells);
  const RegionNodes nodes = classify_region_nodes(g, F.cell_mask);
  for (int i : nodes.boundary)
    if (!std::isfinite(boundary_data.values[i]))
      throw PreconditionViolated("minimize: non-finite boundary value");

  std::vector<char> pinned(g.node_count(), 1);
  for (int i = 0; i < g.node_count(); ++i)
    if (nodes.interior[i]) pinned[i] = 0;

  const EnergyEval ev{g, med, F, region_cells};

  // Start 1: a-harmonic replacement of the boundary data.
  GridFunction u = boundary_data;
  solve_dirichlet(F, u.values, pinned, cfg.solver_tol);

  // Start 2: best two-plane fit of the data, boundary values kept exact.
  if (cfg.two_plane_start) {
    double rmax = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
      if (!F.node_active[i]) continue;
      const auto p = g.node_pos(i);
      rmax = std::max(rmax, std::hypot(p[0], g.dim == 2 ? p[1] : 0.0));
    }
    try {
      const TwoPlaneFit fit = measure_flatness(u, Ball(rmax + g.h));
      GridFunction u2 = boundary_data;
      for (int i = 0; i < g.node_count(); ++i) {
        if (!nodes.interior[i]) continue;
        const auto p = g.node_pos(i);
        const double s = p[0] * fit.nu[0] + (g.dim == 2 ? p[1] * fit.nu[1] : 0.0);
        u2.values[i] = phi(fit.alpha, s);
      }
      if (ev.exact(u2.values) < ev.exact(u.values)) u = u2;
    } catch (const PreconditionViolated&) {
      // region too small for a flatness fit; keep the replacement start
    }
  }

  MinimizerResult res;
  double E = ev.exact(u.values);
  res.trace.push_back(E);

  std::vector<double> eps_schedule = cfg.epsilon_schedule;
  if (eps_schedule.empty()) eps_schedule = {4.0 * g.h, 2.0 * g.h, g.h};

  // Phase-wise a-harmonic solve with the zero set of the pattern source as
  // internal Dirichlet boundary; boundary nodes always keep their data.
  const auto polish_from = [&](const Vec& pattern, const Vec& current) {
    GridFunction up(g, current), um(g, current);
    std::vector<char> pin_p(g.node_count(), 1), pin_m(g.node_count(), 1);
    for (int i = 0; i < g.node_count(); ++i) {
      if (!nodes.interior[i]) continue;
      if (pattern[i] > 0.0)
        pin_p[i] = 0;
      else
        up.values[i] = 0.0;
      if (pattern[i] < 0.0)
        pin_m[i] = 0;
      else
        um.values[i] = 0.0;
    }
    solve_dirichlet(F, up.values, pin_p, cfg.solver_tol);
    solve_dirichlet(F, um.values, pin_m, cfg.solver_tol);
    Vec out = current;
    for (int i = 0; i < g.node_count(); ++i) {
      if (!nodes.interior[i]) continue;
      out[i] = pattern[i] > 0.0 ? up.values[i] : (pattern[i] < 0.0 ? um.values[i] : 0.0);
    }
    return out;
  };

  double step0 = g.h * g.h;  // refined adaptively from accepted steps
  int outer = 0;
  bool converged = false;
  for (; outer < cfg.max_outer; ++outer) {
    const double E_outer = E;

    // Stage 1-2: smoothed descent with exact-energy acceptance. The first
    // trial displaces by about the smoothing width so that interface cells can
    // actually change sign; backtracking handles the overshoot.
    for (double eps : eps_schedule) {
      double step = step0;
      for (int it = 0; it < cfg.descent_steps; ++it) {
        Vec grad = ev.smoothed_gradient(u.values, eps);
        for (int i = 0; i < g.node_count(); ++i)
          if (pinned[i]) grad[i] = 0.0;
        const double gmax = grad.cwiseAbs().maxCoeff();
        if (gmax == 0.0) break;
        bool accepted = false;
        double s = std::max(step * 4.0, 2.0 * eps / gmax);
        for (int bt = 0; bt < 48; ++bt) {
          Vec trial = u.values - s * grad;
          const double Et = ev.exact(trial);
          if (Et < E - cfg.accept_rel * std::abs(E)) {
            u.values = std::move(trial);
            E = Et;
            res.trace.push_back(E);
            step = s;
            accepted = true;
            break;
          }
          s *= 0.5;
        }
        if (!accepted) break;  // stage stalled at this smoothing width
        step0 = step;
      }
    }

    // Stage 3: sign-pattern polish, phase-wise a-harmonic solves with the zero
    // set as internal Dirichlet boundary.
    {
      GridFunction up = u, um = u;
      std::vector<char> pin_p(g.node_count(), 1), pin_m(g.node_count(), 1);
      for (int i = 0; i < g.node_count(); ++i) {
        if (!nodes.interior[i]) continue;
        if (u.values[i] > 0.0)
          pin_p[i] = 0;
        else
          up.values[i] = 0.0;
        if (u.values[i] < 0.0)
          pin_m[i] = 0;
        else
          um.values[i] = 0.0;
      }
      solve_dirichlet(F, up.values, pin_p, cfg.solver_tol);
      solve_dirichlet(F, um.values, pin_m, cfg.solver_tol);
      Vec trial = u.values;
      for (int i = 0; i < g.node_count(); ++i) {
        if (!nodes.interior[i]) continue;
        trial[i] = u.values[i] > 0.0 ? up.values[i]
                                     : (u.values[i] < 0.0 ? um.values[i] : 0.0);
      }
      const double Et = ev.exact(trial);
      if (Et <= E) {
        u.values = std::move(trial);
        if (Et < E) {
          E = Et;
          res.trace.push_back(E);
        }
      }
    }

    if (E_outer - E <= cfg.converge_rel * std::abs(E_outer)) {
      converged = true;
      ++outer;
      break;
    }
  }

  res.u = std::move(u);
  res.iterations = outer;
  res.converged = converged;
  res.energy = energy(g, med, res.u, region_cells);
  return res;
}

HarmonicGapReport harmonic_gap(const Grid& g, const MediumOnGrid& med, double lambda,
                               const GridFunction& u, const Ball& ball) {
  const auto cells = cells_in_ball(g, ball);
  HarmonicGapReport rep;
  rep.replacement = harmonic_replacement(g, med, u, cells);
  const Eigen::MatrixXd gu = cell_gradient(u);
  const Eigen::MatrixXd gv = cell_gradient(rep.replacement);
  double acc = 0.0;
  for (int c : cells) acc += (gu.row(c) - gv.row(c)).squaredNorm();
  rep.gap = std::sqrt(acc / static_cast<double>(cells.size()));
  double qmax = 0.0;
  for (int c : cells) qmax = std::max(qmax, std::max(med.qp2[c], med.qm2[c]));
  rep.bound = 2.0 * std::sqrt(lambda * qmax);
  rep.within_bound = rep.gap <= rep.bound;
  return rep;
}

double boundary_strip_energy(const GridFunction& u, double s, const Ball& ball) {
  if (!(s > 0.0) || s > ball.radius / 2.0)
    throw PreconditionViolated("boundary_strip_energy: need 0 < s <= r/2");
  const Grid& g = u.grid;
  const auto cells = cells_in_ball(g, ball);
  const Arr cv = cell_values(u);
  const Eigen::MatrixXd gu = cell_gradient(u);
  const double hd = g.cell_volume();
  double acc = 0.0;
  for (int c : cells) {
    const double av = std::abs(cv[c]);
    if (av > 0.0 && av < s) acc += (gu.row(c).squaredNorm() + 1.0) * hd;
  }
  return acc;
}

EnergyDifferenceReport energy_difference_check(const GridFunction& v0,
                                               const GridFunction& v1, double mu,
                                               const std::vector<int>& cells) {
  const Grid& g = v0.grid;
  if (!v0.grid.same_layout(v1.grid))
    throw PreconditionViolated("energy_difference_check: grids differ");
  if (mu < 0.0) throw PreconditionViolated("energy_difference_check: mu must be >= 0");
  std::vector<char> mask(g.cell_count(), 0);
  for (int c : cells) mask[c] = 1;
  const RegionNodes nodes = classify_region_nodes(g, mask);

  for (int i = 0; i < g.node_count(); ++i) {
    if (!nodes.active[i]) continue;
    if (v0.values[i] > v1.values[i] + 1e-12)
      throw PreconditionViolated("energy_difference_check: v0 <= v1 fails at node " +
                                 std::to_string(i));
  }
  for (int i : nodes.boundary) {
    if (std::abs(v0.values[i] - v1.values[i]) > 1e-12)
      throw PreconditionViolated("energy_difference_check: v0 = v1 fails on the boundary layer");
    if (v0.values[i] < -1e-12)
      throw PreconditionViolated("energy_difference_check: boundary values must be >= 0");
  }

  // Stencil verification of the sub/super hypotheses on {v1 > (v0)+}.
  const int n = g.nodes_per_axis;
  const double inv_h2 = 1.0 / (g.h * g.h);
  auto laplacian = [&](const Vec& v, int i) {
    if (g.dim == 1) return (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2;
    return (v[i - 1] + v[i + 1] + v[i - n] + v[i + n] - 4.0 * v[i]) * inv_h2;
  };
  const double tol_st = 1e-8;
  bool sub_ok = true, super_ok = true;
  for (int i = 0; i < g.node_count(); ++i) {
    if (!nodes.interior[i]) continue;
    if (!(v1.values[i] > pos_part(v0.values[i]))) continue;
    if (laplacian(v1.values, i) < mu - tol_st) sub_ok = false;
    if (laplacian(v0.values, i) > -mu + tol_st) super_ok = false;
    if (!sub_ok && !super_ok) break;
  }
  if (!sub_ok && !super_ok)
    throw PreconditionViolated(
        "energy_difference_check: neither the subharmonicity of v1 nor the "
        "superharmonicity of v0 holds on {v1 > (v0)+}");

  const Arr cv0 = cell_values(v0), cv1 = cell_values(v1);
  const Eigen::MatrixXd g0 = cell_gradient(v0), g1 = cell_gradient(v1);
  const double hd = g.cell_volume();
  EnergyDifferenceReport rep;
  rep.sub_applicable = sub_ok;
  rep.super_applicable = super_ok;
  double gmax2 = 0.0;
  for (int c : cells) {
    const bool in_o0bar = cv0[c] >= 0.0;
    const bool in_o1 = cv1[c] > 0.0;
    const double e0 = g0.row(c).squaredNorm(), e1 = g1.row(c).squaredNorm();
    gmax2 = std::max(gmax2, std::max(e0, e1));
    if (in_o0bar) rep.lhs += e0 * hd;
    if (in_o1) rep.lhs -= e1 * hd;
    if (in_o1 && !in_o0bar) {
      rep.rhs_sub += e1 * hd;
      rep.rhs_super += e0 * hd;
    }
    if (in_o1) {
      const double bulk = 2.0 * mu * (cv1[c] - pos_part(cv0[c])) * hd;
      rep.rhs_sub += bulk;
      rep.rhs_super -= bulk;
    }
  }
  rep.slack = 10.0 * (1.0 + gmax2) * g.h;
  rep.sub_holds = sub_ok && rep.lhs >= rep.rhs_sub - rep.slack;
  rep.super_holds = super_ok && rep.lhs <= rep.rhs_super + rep.slack;
  return rep;
}

}  // namespace fbh

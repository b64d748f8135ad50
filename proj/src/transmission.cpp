#include "fbh/transmission.hpp"

#include <algorithm>
#include <cmath>

#include "fbh/solver.hpp"
#include "fbh/stencil.hpp"
#include "fbh/twoplane.hpp"

namespace fbh {

namespace {

constexpr double kInfiniteAlphaThreshold = 1e8;

double xd_of(const std::array<double, 2>& p, int dim) { return dim == 1 ? p[0] : p[1]; }

struct NodeSets {
  std::vector<char> unknown;  // strictly inside the ball
  std::vector<char> active;   // unknown plus the Dirichlet ring
};

NodeSets classify(const Grid& g) {
  NodeSets s;
  const int nn = g.node_count();
  s.unknown.assign(nn, 0);
  s.active.assign(nn, 0);
  for (int i = 0; i < nn; ++i) {
    const auto p = g.node_pos(i);
    const double r2 = p[0] * p[0] + (g.dim == 2 ? p[1] * p[1] : 0.0);
    if (r2 < 1.0 - 1e-12) s.unknown[i] = 1;
  }
  const int n = g.nodes_per_axis;
  for (int i = 0; i < nn; ++i) {
    if (!s.unknown[i]) continue;
    s.active[i] = 1;
    const int ix = g.dim == 1 ? i : i % n;
    const int iy = g.dim == 1 ? 0 : i / n;
    auto touch = [&](int jx, int jy) {
      if (jx < 0 || jx >= n || (g.dim == 2 && (jy < 0 || jy >= n))) return;
      s.active[g.dim == 1 ? jx : g.node_index(jx, jy)] = 1;
    };
    touch(ix - 1, iy);
    touch(ix + 1, iy);
    if (g.dim == 2) {
      touch(ix, iy - 1);
      touch(ix, iy + 1);
    }
  }
  return s;
}

// Row-symmetrized transmission weights: A+ above the interface, A- below,
// zero tangential conductance on the interface line itself (finite alpha).
// With A+ = A- and tangential interface weight restored this is the plain
// Laplacian used for alpha = infinity.
DirichletForm transmission_form(const Grid& g, const NodeSets& s, double a_plus,
                                double a_minus, bool interface_tangential) {
  const int n = g.nodes_per_axis, m = g.cells_per_axis;
  const double hpow = std::pow(g.h, g.dim - 2);
  Arr wx, wy;
  if (g.dim == 1) {
    wx = Arr::Zero(m);
    for (int ix = 0; ix < m; ++ix) {
      const int a = ix, b = ix + 1;
      if (!(s.active[a] && s.active[b]) || !(s.unknown[a] || s.unknown[b])) continue;
      const double ymid = -g.R + g.h * (ix + 0.5);
      wx[ix] = (ymid > 0.0 ? a_plus : a_minus) * hpow;
    }
    return DirichletForm::from_weights(g, wx, wy, std::vector<char>(g.cell_count(), 0),
                                       s.active);
  }
  wx = Arr::Zero(m * n);
  wy = Arr::Zero(n * m);
  for (int iy = 0; iy < n; ++iy) {
    const double y = -g.R + g.h * iy;
    for (int ix = 0; ix < m; ++ix) {
      const int a = g.node_index(ix, iy), b = g.node_index(ix + 1, iy);
      if (!(s.active[a] && s.active[b]) || !(s.unknown[a] || s.unknown[b])) continue;
      double w;
      if (std::abs(y) < g.h / 2.0)
        w = interface_tangential ? 1.0 : 0.0;  // tangential edge on the interface
      else
        w = y > 0.0 ? a_plus : a_minus;
      wx[ix + m * iy] = w * hpow;
    }
  }
  for (int iy = 0; iy < m; ++iy) {
    const double ymid = -g.R + g.h * (iy + 0.5);
    for (int ix = 0; ix < n; ++ix) {
      const int a = g.node_index(ix, iy), b = g.node_index(ix, iy + 1);
      if (!(s.active[a] && s.active[b]) || !(s.unknown[a] || s.unknown[b])) continue;
      wy[ix + n * iy] = (ymid > 0.0 ? a_plus : a_minus) * hpow;
    }
  }
  return DirichletForm::from_weights(g, wx, wy, std::vector<char>(g.cell_count(), 0),
                                     s.active);
}

double node_value(const GridFunction& w, int ix, int iy) {
  return w.values[w.grid.dim == 1 ? ix : w.grid.node_index(ix, iy)];
}

}  // namespace

TransmissionProblem TransmissionProblem::on_ball(double alpha, const GridFunction& h) {
  if (alpha < 0.0) throw PreconditionViolated("transmission: alpha must be >= 0");
  TransmissionProblem p;
  p.alpha = alpha;
  p.infinite_alpha = alpha > kInfiniteAlphaThreshold;
  p.grid = h.grid;
  p.boundary = h;
  return p;
}

TransmissionProblem TransmissionProblem::infinite(const GridFunction& h) {
  TransmissionProblem p;
  p.alpha = std::numeric_limits<double>::infinity();
  p.infinite_alpha = true;
  p.grid = h.grid;
  p.boundary = h;
  return p;
}

TransmissionSolution solve_transmission(const TransmissionProblem& problem, double tol) {
  const Grid& g = problem.grid;
  for (int i = 0; i < g.node_count(); ++i)
    if (!std::isfinite(problem.boundary.values[i]))
      throw PreconditionViolated("transmission: boundary data must be finite");

  const NodeSets s = classify(g);
  TransmissionSolution sol;
  sol.alpha = problem.alpha;
  sol.infinite_alpha = problem.infinite_alpha;
  sol.w = problem.boundary;

  std::vector<char> pinned(g.node_count(), 1);
  for (int i = 0; i < g.node_count(); ++i)
    if (s.unknown[i]) pinned[i] = 0;

  if (problem.infinite_alpha) {
    const DirichletForm F = transmission_form(g, s, 1.0, 1.0, true);
    solve_dirichlet(F, sol.w.values, pinned, tol);
  } else if (problem.alpha == 0.0) {
    // Neumann problem in the upper half, then Dirichlet data from above
    // driven into the lower problem.
    std::vector<char> pin_up = pinned;
    for (int i = 0; i < g.node_count(); ++i) {
      const double xd = xd_of(g.node_pos(i), g.dim);
      if (xd < -g.h / 2.0) pin_up[i] = 1;  // freeze the lower half
    }
    const DirichletForm Fup = transmission_form(g, s, 1.0, 0.0, false);
    // tangential interface edges carry the half-cell weight of the upper
    // assembly so the interface rows are the natural Neumann stencil
    DirichletForm Fup2 = Fup;
    if (g.dim == 2) {
      const int m = g.cells_per_axis, n = g.nodes_per_axis;
      const int iy0 = static_cast<int>(std::lround(g.R / g.h));
      for (int ix = 0; ix < m; ++ix) {
        const int a = g.node_index(ix, iy0), b = g.node_index(ix + 1, iy0);
        if ((s.active[a] && s.active[b]) && (s.unknown[a] || s.unknown[b]))
          Fup2.wx[ix + m * iy0] = 0.5;
      }
      (void)n;
    }
    solve_dirichlet(Fup2, sol.w.values, pin_up, tol);
    std::vector<char> pin_down = pinned;
    for (int i = 0; i < g.node_count(); ++i) {
      const double xd = xd_of(g.node_pos(i), g.dim);
      if (xd > -g.h / 2.0) pin_down[i] = 1;  // interface trace is now data
    }
    const DirichletForm Fdn = transmission_form(g, s, 0.0, 1.0, false);
    solve_dirichlet(Fdn, sol.w.values, pin_down, tol);
  } else {
    const double a2 = problem.alpha * problem.alpha;
    const DirichletForm F = transmission_form(g, s, 1.0 + a2, a2, false);
    solve_dirichlet(F, sol.w.values, pinned, tol);
  }

  // Interface diagnostics at the origin (second-order one-sided stencils).
  const int n = g.nodes_per_axis;
  const int i0 = (n - 1) / 2;  // origin index along each axis
  const double h = g.h;
  if (g.dim == 1) {
    sol.gamma_plus = (-3.0 * node_value(sol.w, i0, 0) + 4.0 * node_value(sol.w, i0 + 1, 0) -
                      node_value(sol.w, i0 + 2, 0)) /
                     (2.0 * h);
    sol.gamma_minus = (3.0 * node_value(sol.w, i0, 0) - 4.0 * node_value(sol.w, i0 - 1, 0) +
                       node_value(sol.w, i0 - 2, 0)) /
                      (2.0 * h);
  } else {
    sol.gamma_plus =
        (-3.0 * node_value(sol.w, i0, i0) + 4.0 * node_value(sol.w, i0, i0 + 1) -
         node_value(sol.w, i0, i0 + 2)) /
        (2.0 * h);
    sol.gamma_minus =
        (3.0 * node_value(sol.w, i0, i0) - 4.0 * node_value(sol.w, i0, i0 - 1) +
         node_value(sol.w, i0, i0 - 2)) /
        (2.0 * h);
    sol.tau[0] = (node_value(sol.w, i0 + 1, i0) - node_value(sol.w, i0 - 1, i0)) / (2.0 * h);

    // First-order flux balance over all interior interface nodes.
    if (!problem.infinite_alpha && problem.alpha > 0.0) {
      const double a2 = problem.alpha * problem.alpha;
      double worst = 0.0;
      for (int ix = 0; ix < n; ++ix) {
        const int i = g.node_index(ix, i0);
        if (!s.unknown[i]) continue;
        const double dplus = (node_value(sol.w, ix, i0 + 1) - node_value(sol.w, ix, i0)) / h;
        const double dminus = (node_value(sol.w, ix, i0) - node_value(sol.w, ix, i0 - 1)) / h;
        worst = std::max(worst, std::abs((1.0 + a2) * dplus - a2 * dminus));
      }
      sol.interface_balance = worst;
    }
  }
  return sol;
}

std::vector<double> transmission_continuity(const std::vector<double>& alphas,
                                            double target_alpha, bool infinite_target,
                                            const GridFunction& h) {
  const TransmissionProblem ptarget =
      infinite_target ? TransmissionProblem::infinite(h)
                      : TransmissionProblem::on_ball(target_alpha, h);
  const TransmissionSolution wt = solve_transmission(ptarget);
  std::vector<double> devs;
  for (double a : alphas) {
    const TransmissionSolution wa = solve_transmission(TransmissionProblem::on_ball(a, h));
    double dev = 0.0;
    for (int i = 0; i < h.grid.node_count(); ++i) {
      const auto p = h.grid.node_pos(i);
      if (p[0] * p[0] + (h.grid.dim == 2 ? p[1] * p[1] : 0.0) <= 1.0)
        dev = std::max(dev, std::abs(wa.w.values[i] - wt.w.values[i]));
    }
    devs.push_back(dev);
  }
  return devs;
}

GridFunction flat_correction(const GridFunction& u, double alpha, double delta,
                             const Ball& region) {
  if (!(alpha > 0.0)) throw DegenerateSlope("flat_correction: alpha must be > 0");
  if (!(delta > 0.0)) throw PreconditionViolated("flat_correction: delta must be > 0");
  const Grid& g = u.grid;
  GridFunction w(g);
  for (int i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_pos(i);
    if (!region.contains(p, g.dim)) continue;
    const double xd = xd_of(p, g.dim);
    const double lo = phi(alpha, xd - delta), hi = phi(alpha, xd + delta);
    if (u.values[i] < lo - 1e-12 || u.values[i] > hi + 1e-12)
      throw NotFlat("flat_correction: flatness violated at node " + std::to_string(i));
    w.values[i] = (psi(alpha, u.values[i]) - xd) / delta;
  }
  return w;
}

double expansion_residual(const GridFunction& u, double alpha, double delta,
                          const TransmissionSolution& sol) {
  if (!(alpha > 0.0)) throw DegenerateSlope("expansion_residual: alpha must be > 0");
  const Grid& g = u.grid;
  if (!g.same_layout(sol.w.grid))
    throw PreconditionViolated("expansion_residual: grids differ");
  const int i0 = (g.nodes_per_axis - 1) / 2;
  const double w0 =
      g.dim == 1 ? sol.w.values[i0] : sol.w.values[g.node_index(i0, i0)];
  double eta = 0.0;
  const Ball half(0.5);
  for (int i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_pos(i);
    if (!half.contains(p, g.dim)) continue;
    const double xd = xd_of(p, g.dim);
    const double wz = sol.w.values[i] - w0;
    eta = std::max(eta, std::abs(psi(alpha, u.values[i]) - (xd + delta * wz)) / delta);
  }
  return eta;
}

C11Fit c11_fit(const TransmissionSolution& sol, const std::vector<double>& radii) {
  const Grid& g = sol.w.grid;
  const int i0 = (g.nodes_per_axis - 1) / 2;
  const double w0 = g.dim == 1 ? sol.w.values[i0] : sol.w.values[g.node_index(i0, i0)];
  C11Fit fit;
  fit.radii = radii;

  const int nb = g.dim == 2 ? 3 : 2;  // basis: [x'], pos(x_d), min0(x_d)
  bool first = true;
  for (double r : radii) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
    Vec rhs = Vec::Zero(nb);
    std::vector<int> nodes;
    for (int i = 0; i < g.node_count(); ++i) {
      const auto p = g.node_pos(i);
      if (!Ball(r).contains(p, g.dim)) continue;
      nodes.push_back(i);
      Vec b(nb);
      const double xd = xd_of(p, g.dim);
      int k = 0;
      if (g.dim == 2) b[k++] = p[0];
      b[k++] = pos_part(xd);
      b[k] = min0(xd);
      M += b * b.transpose();
      rhs += b * (sol.w.values[i] - w0);
    }
    const Vec coef = M.ldlt().solve(rhs);
    double defect = 0.0;
    for (int i : nodes) {
      const auto p = g.node_pos(i);
      const double xd = xd_of(p, g.dim);
      double model = 0.0;
      int k = 0;
      if (g.dim == 2) model += coef[k++] * p[0];
      model += coef[k++] * pos_part(xd);
      model += coef[k] * min0(xd);
      defect = std::max(defect, std::abs(sol.w.values[i] - w0 - model));
    }
    fit.defects.push_back(defect);
    if (first) {
      int k = 0;
      if (g.dim == 2) fit.tau[0] = coef[k++];
      fit.gamma_plus = coef[k++];
      fit.gamma_minus = coef[k];
      first = false;
    }
  }
  fit.coeff_norm = fit.tau.norm() + std::abs(fit.gamma_plus) + std::abs(fit.gamma_minus);
  for (int i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_pos(i);
    if (p[0] * p[0] + (g.dim == 2 ? p[1] * p[1] : 0.0) <= 1.0)
      fit.w_inf = std::max(fit.w_inf, std::abs(sol.w.values[i]));
  }
  if (radii.size() >= 2) fit.defect_fit = loglog_fit(radii, fit.defects);
  return fit;
}

}  // namespace fbh

#include "fbh/elliptic.hpp"

#include <cmath>

#include "fbh/norms.hpp"

namespace fbh {

GridFunction harmonic_replacement(const Grid& g, const MediumOnGrid& med,
                                  const GridFunction& u, const std::vector<int>& V,
                                  double tol) {
  if (V.empty()) throw PreconditionViolated("harmonic_replacement: empty cell set");
  DirichletForm F = DirichletForm::box(g, med, V);
  RegionNodes nodes = classify_region_nodes(g, F.cell_mask);
  std::vector<char> pinned(g.node_count(), 1);
  for (int i = 0; i < g.node_count(); ++i)
    if (nodes.interior[i]) pinned[i] = 0;
  for (int i : nodes.boundary)
    if (!std::isfinite(u.values[i]))
      throw PreconditionViolated("harmonic_replacement: non-finite boundary value");
  GridFunction out = u;
  solve_dirichlet(F, out.values, pinned, tol);
  return out;
}

namespace {

Grid unit_cell_grid(int dim, int resolution) {
  if (resolution % 2 != 0 || resolution < 16)
    throw ConfigInvalid("cell_resolution must be an even integer >= 16");
  return Grid(dim, 0.5, 1.0 / resolution);
}

// Medium samples on the unit-cell grid, indexed to match its cells.
MediumOnGrid unit_cell_medium(const CoefficientField& field) {
  Grid g = unit_cell_grid(field.dim, field.cell_resolution);
  return sample_medium(g, field);
}

// Fill the duplicate boundary nodes of a periodic nodal field.
void fill_periodic_duplicates(const Grid& g, Vec& v) {
  const int m = g.cells_per_axis, n = g.nodes_per_axis;
  if (g.dim == 1) {
    v[m] = v[0];
    return;
  }
  for (int iy = 0; iy < m; ++iy) v[g.node_index(m, iy)] = v[g.node_index(0, iy)];
  for (int ix = 0; ix <= m; ++ix) v[g.node_index(ix, m)] = v[g.node_index(ix % m, 0)];
  (void)n;
}

}  // namespace

Vec CorrectorSet::chi_q(const Vec2& q) const {
  Vec out = q[0] * chi_e[0];
  if (static_cast<int>(chi_e.size()) == 2) out += q[1] * chi_e[1];
  return out;
}

double CorrectorSet::chi_at(int k, double x, double y) const {
  const int m = cell_grid.cells_per_axis;
  const Vec& v = chi_e[k];
  auto wrap = [m](double t, int& i0, int& i1, double& w) {
    double f = (t + 0.5) * m;  // grid spans [-1/2, 1/2]
    f -= std::floor(f / m) * m;
    i0 = static_cast<int>(std::floor(f));
    if (i0 >= m) i0 -= m;
    w = f - std::floor(f);
    if (w < 0.0) w = 0.0;
    i1 = (i0 + 1) % m;
  };
  int ix0, ix1, iy0 = 0, iy1 = 0;
  double wxf, wyf = 0.0;
  wrap(x, ix0, ix1, wxf);
  if (cell_grid.dim == 2) wrap(y, iy0, iy1, wyf);
  const int n = cell_grid.nodes_per_axis;
  if (cell_grid.dim == 1) return (1.0 - wxf) * v[ix0] + wxf * v[ix1];
  return (1.0 - wxf) * (1.0 - wyf) * v[ix0 + n * iy0] + wxf * (1.0 - wyf) * v[ix1 + n * iy0] +
         (1.0 - wxf) * wyf * v[ix0 + n * iy1] + wxf * wyf * v[ix1 + n * iy1];
}

GridFunction CorrectorSet::chi_q_on(const Grid& g, const Vec2& q) const {
  GridFunction out(g);
  for (int i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_pos(i);
    double v = q[0] * chi_at(0, p[0], p[1]);
    if (g.dim == 2) v += q[1] * chi_at(1, p[0], p[1]);
    out.values[i] = v;
  }
  return out;
}

double CorrectorSet::mean(int k) const {
  const int m = cell_grid.cells_per_axis;
  const Vec& v = chi_e[k];
  double acc = 0.0;
  int cnt = 0;
  const int n = cell_grid.nodes_per_axis;
  if (cell_grid.dim == 1) {
    for (int i = 0; i < m; ++i) acc += v[i];
    cnt = m;
  } else {
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix) {
        acc += v[ix + n * iy];
        ++cnt;
      }
  }
  return acc / cnt;
}

CorrectorSet solve_correctors(const CoefficientField& field, double tol) {
  CorrectorSet set;
  set.cell_grid = unit_cell_grid(field.dim, field.cell_resolution);
  set.lambda = field.lambda;
  const MediumOnGrid med = unit_cell_medium(field);
  const DirichletForm F = DirichletForm::periodic_cell(set.cell_grid, med);
  for (int k = 0; k < field.dim; ++k) {
    Vec2 e = Vec2::Zero();
    e[k] = 1.0;
    const Vec b = -F.plane_flux(e);
    Vec chi;
    solve_meanzero(F, b, chi, tol);
    fill_periodic_duplicates(set.cell_grid, chi);
    set.chi_e.push_back(std::move(chi));
  }
  return set;
}

GridFunction solve_corrector(const CoefficientField& field, const Vec2& q, double tol) {
  CorrectorSet set = solve_correctors(field, tol);
  return GridFunction(set.cell_grid, set.chi_q(q));
}

HomogenizedMatrix homogenized_matrix(const CoefficientField& field,
                                     const CorrectorSet& correctors) {
  const Grid& g = correctors.cell_grid;
  const MediumOnGrid med = unit_cell_medium(field);
  const DirichletForm F = DirichletForm::periodic_cell(g, med);
  const int d = field.dim;
  Mat2 raw = Mat2::Identity();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Vec2 ei = Vec2::Zero(), ej = Vec2::Zero();
      ei[i] = 1.0;
      ej[j] = 1.0;
      raw(i, j) = F.corrected_bilinear(ei, correctors.chi_e[i], ej, correctors.chi_e[j]);
      // the periodic form integrates over the unit cell, |Y| = 1
    }
  HomogenizedMatrix hm;
  hm.asymmetry = d == 2 ? std::abs(raw(0, 1) - raw(1, 0)) : 0.0;
  if (hm.asymmetry > 1e-10)
    throw EllipticityViolation("homogenized matrix asymmetry " + std::to_string(hm.asymmetry));
  hm.abar = 0.5 * (raw + raw.transpose());
  if (d == 1) hm.abar(1, 1) = 1.0;
  // ellipticity inheritance check
  const double tr = hm.abar(0, 0) + (d == 2 ? hm.abar(1, 1) : hm.abar(0, 0));
  const double det = d == 2 ? hm.abar.determinant() : hm.abar(0, 0) * hm.abar(0, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double emin = tr / 2.0 - disc, emax = tr / 2.0 + disc;
  if (emin < 1.0 / field.lambda - 1e-8 || emax > field.lambda + 1e-8)
    throw EllipticityViolation("homogenized matrix outside ellipticity bounds");
  return hm;
}

HomogenizedMatrix homogenized_matrix(const CoefficientField& field) {
  return homogenized_matrix(field, solve_correctors(field));
}

double dual_energy(const CoefficientField& field, double t, const Vec2& q, double h,
                   double tol) {
  if (t < 1.0) throw PreconditionViolated("dual_energy: t must be >= 1");
  const Grid g(field.dim, t, h);
  const MediumOnGrid med = sample_medium(g, field);
  const auto cells = cells_in_ball(g, Ball(t));
  const DirichletForm Fa = DirichletForm::box(g, med, cells);
  const MediumOnGrid unit = constant_medium(g, Mat2::Identity(), 0.0, 0.0);
  const DirichletForm F1 = DirichletForm::box(g, unit, cells);
  const Vec d = F1.plane_flux(q);
  Vec v;
  solve_meanzero(Fa, d, v, tol);
  const double vol = static_cast<double>(cells.size()) * g.cell_volume();
  return (0.5 * Fa.energy(v) - d.dot(v)) / vol;
}

double relative_residual(const Grid& g, const MediumOnGrid& med, const GridFunction& v,
                         const std::vector<int>& cells) {
  const DirichletForm F = DirichletForm::box(g, med, cells);
  const RegionNodes nodes = classify_region_nodes(g, F.cell_mask);
  const Vec Av = F.apply(v.values);
  const Arr diag = F.diagonal();
  double vmax = 0.0;
  for (int i = 0; i < g.node_count(); ++i)
    if (F.node_active[i]) vmax = std::max(vmax, std::abs(v.values[i]));
  double worst = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    if (!nodes.interior[i]) continue;
    worst = std::max(worst, std::abs(Av[i]) / std::max(diag[i], 1e-300));
  }
  return worst / (1.0 + vmax);
}

AlFit al_linear_fit(const Grid& g, const MediumOnGrid& med, const GridFunction& v,
                    double r, double R, const CorrectorSet& correctors) {
  if (!(r >= 1.0 && r <= R)) throw PreconditionViolated("al_linear_fit: need 1 <= r <= R");
  const auto cells_R = cells_in_ball(g, Ball(R));
  const double res = relative_residual(g, med, v, cells_R);
  if (res > 1e-6)
    throw NotHarmonic("al_linear_fit: discrete residual " + std::to_string(res));

  const int d = g.dim;
  const auto cells_r = cells_in_ball(g, Ball(r));
  const Eigen::MatrixXd gv = cell_gradient(v);
  std::vector<Eigen::MatrixXd> gb(d);
  for (int k = 0; k < d; ++k) {
    Vec2 e = Vec2::Zero();
    e[k] = 1.0;
    GridFunction corrected(g);
    for (int i = 0; i < g.node_count(); ++i) {
      const auto p = g.node_pos(i);
      corrected.values[i] = p[0] * e[0] + (d == 2 ? p[1] * e[1] : 0.0) +
                            correctors.chi_at(k, p[0], p[1]);
    }
    gb[k] = cell_gradient(corrected);
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  Vec rhs = Vec::Zero(d);
  double vv = 0.0;
  for (int c : cells_r) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) M(i, j) += gb[i].row(c).dot(gb[j].row(c));
      rhs[i] += gb[i].row(c).dot(gv.row(c));
    }
    vv += gv.row(c).squaredNorm();
  }
  const Vec xi = M.ldlt().solve(rhs);
  double res2 = vv - 2.0 * xi.dot(rhs) + xi.dot(M * xi);
  res2 = std::max(0.0, res2) / static_cast<double>(cells_r.size());

  AlFit out;
  out.xi = Vec2::Zero();
  for (int k = 0; k < d; ++k) out.xi[k] = xi[k];
  out.residual = std::sqrt(res2);
  out.gradient_norm = avg_gradient_l2(v, Ball(R));
  return out;
}

}  // namespace fbh

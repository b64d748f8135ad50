#include "fbh/solver.hpp"

#include <cmath>

namespace fbh {

namespace {

Arr precond_diag(const DirichletForm& F, const std::vector<char>& free_mask) {
  Arr d = F.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!free_mask[i] || d[i] <= 0.0) d[i] = 1.0;
  }
  return d;
}

void mask_to(Vec& v, const std::vector<char>& keep) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!keep[i]) v[i] = 0.0;
}

}  // namespace

CgResult solve_dirichlet(const DirichletForm& F, Vec& u, const std::vector<char>& pinned,
                         double tol) {
  const int nn = F.grid.node_count();
  std::vector<char> free_mask(nn, 0);
  int nfree = 0;
  for (int i = 0; i < nn; ++i) {
    free_mask[i] = F.node_active[i] && !pinned[i];
    nfree += free_mask[i];
  }
  if (nfree == 0) return {0, 0.0};

  Vec r = -F.apply(u);
  mask_to(r, free_mask);
  const double rhs_norm = r.norm();
  if (rhs_norm < 1e-300) return {0, 0.0};

  const Arr dinv = precond_diag(F, free_mask).inverse();
  Vec z = (r.array() * dinv).matrix();
  mask_to(z, free_mask);
  Vec p = z;
  double rz = r.dot(z);
  const int cap = 50 * F.grid.nodes_per_axis;
  for (int it = 1; it <= cap; ++it) {
    Vec Ap = F.apply(p);
    mask_to(Ap, free_mask);
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0) throw SolverDivergence("CG: non-positive curvature");
    const double alpha = rz / pAp;
    for (int i = 0; i < nn; ++i)
      if (free_mask[i]) u[i] += alpha * p[i];
    r -= alpha * Ap;
    const double res = r.norm() / rhs_norm;
    if (res <= tol) return {it, res};
    z = (r.array() * dinv).matrix();
    mask_to(z, free_mask);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverDivergence("CG failed to reach tolerance in " + std::to_string(cap) +
                         " iterations");
}

CgResult solve_meanzero(const DirichletForm& F, const Vec& b, Vec& u, double tol) {
  const int nn = F.grid.node_count();
  int nact = 0;
  for (int i = 0; i < nn; ++i) nact += F.node_active[i];
  if (nact == 0) return {0, 0.0};
  const auto project = [&](Vec& v) {
    double mean = 0.0;
    for (int i = 0; i < nn; ++i)
      if (F.node_active[i]) mean += v[i];
    mean /= nact;
    for (int i = 0; i < nn; ++i) v[i] = F.node_active[i] ? v[i] - mean : 0.0;
  };

  Vec rhs = b;
  project(rhs);
  u = Vec::Zero(nn);
  Vec r = rhs;
  const double rhs_norm = rhs.norm();
  if (rhs_norm < 1e-300) return {0, 0.0};

  std::vector<char> act(nn);
  for (int i = 0; i < nn; ++i) act[i] = F.node_active[i];
  const Arr dinv = precond_diag(F, act).inverse();

  Vec z = (r.array() * dinv).matrix();
  project(z);
  Vec p = z;
  double rz = r.dot(z);
  const int cap = 50 * F.grid.nodes_per_axis;
  for (int it = 1; it <= cap; ++it) {
    Vec Ap = F.apply(p);
    project(Ap);
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0) throw SolverDivergence("CG(mean-zero): non-positive curvature");
    const double alpha = rz / pAp;
    u += alpha * p;
    r -= alpha * Ap;
    const double res = r.norm() / rhs_norm;
    if (res <= tol) {
      project(u);
      return {it, res};
    }
    z = (r.array() * dinv).matrix();
    project(z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverDivergence("CG(mean-zero) failed to reach tolerance");
}

}  // namespace fbh

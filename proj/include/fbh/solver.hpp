#ifndef FBH_SOLVER_HPP
#define FBH_SOLVER_HPP

#include <vector>

#include "fbh/stencil.hpp"
#include "fbh/types.hpp"

namespace fbh {

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Minimize the form over non-pinned active nodes; u carries the pinned values
/// on entry and the solution on exit. Diagonally preconditioned CG, relative
/// residual tol, iteration cap 50 * nodes_per_axis. Throws SolverDivergence.
CgResult solve_dirichlet(const DirichletForm& F, Vec& u, const std::vector<char>& pinned,
                         double tol = 1e-10);

/// Solve A u = b on the active nodes in the mean-zero subspace (pure periodic
/// or pure Neumann problems); b and all iterates are projected.
CgResult solve_meanzero(const DirichletForm& F, const Vec& b, Vec& u, double tol = 1e-10);

}  // namespace fbh

#endif

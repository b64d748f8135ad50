#ifndef FBH_ELLIPTIC_HPP
#define FBH_ELLIPTIC_HPP

#include <vector>

#include "fbh/coefficients.hpp"
#include "fbh/grid.hpp"
#include "fbh/solver.hpp"
#include "fbh/stencil.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// a-harmonic replacement of u on the cell set V: equals u outside V, solves
/// the discrete divergence-form system inside to relative residual tol.
GridFunction harmonic_replacement(const Grid& g, const MediumOnGrid& med,
                                  const GridFunction& u, const std::vector<int>& V,
                                  double tol = 1e-10);

/// Periodic mean-zero correctors chi_{e_k} on the unit cell, plus chi_q by
/// linearity. Values live on a [-1/2,1/2]^dim grid with the duplicate boundary
/// nodes filled periodically.
struct CorrectorSet {
  Grid cell_grid;
  std::vector<Vec> chi_e;  // nodal values per coordinate direction
  double lambda = 1.0;

  /// chi_q = sum_k q_k chi_{e_k}, exact by construction.
  Vec chi_q(const Vec2& q) const;
  /// Periodic (multi)linear evaluation at an arbitrary point.
  double chi_at(int k, double x, double y) const;
  /// Sample chi_q onto the nodes of another grid.
  GridFunction chi_q_on(const Grid& g, const Vec2& q) const;
  /// Cell average of chi_{e_k} over the unit cell.
  double mean(int k) const;
};

CorrectorSet solve_correctors(const CoefficientField& field, double tol = 1e-10);

/// chi_q as a GridFunction on the unit cell.
GridFunction solve_corrector(const CoefficientField& field, const Vec2& q,
                             double tol = 1e-10);

struct HomogenizedMatrix {
  Mat2 abar = Mat2::Identity();
  double asymmetry = 0.0;  // |a12 - a21| before symmetrization
};

/// abar_ij = <(e_i + grad chi_i) . a (e_j + grad chi_j)> via the discrete
/// periodic form. Checks symmetry (1e-10) and the ellipticity bounds.
HomogenizedMatrix homogenized_matrix(const CoefficientField& field,
                                     const CorrectorSet& correctors);
HomogenizedMatrix homogenized_matrix(const CoefficientField& field);

/// Dual energy mu(B_t, q) = min_v avg(1/2 grad v . a grad v - q . grad v),
/// solved as a pure-Neumann problem on the cells of B_t.
double dual_energy(const CoefficientField& field, double t, const Vec2& q,
                   double h = 0.125, double tol = 1e-10);

struct AlFit {
  Vec2 xi = Vec2::Zero();
  double residual = 0.0;       // attained avg-L2 minimum
  double gradient_norm = 0.0;  // ||grad v||_{avg L2(B_R)} for the |xi| <= C check
};

/// Least-squares corrected-plane fit of an a-harmonic v on B_r:
/// xi minimizes ||grad v - (xi + grad chi_xi)||_{avg L2(B_r)}.
/// Throws NotHarmonic when the discrete residual of v in B_R exceeds 1e-6.
AlFit al_linear_fit(const Grid& g, const MediumOnGrid& med, const GridFunction& v,
                    double r, double R, const CorrectorSet& correctors);

/// Relative discrete residual of v on the interior nodes of the cell set
/// (scaled by the stencil diagonal and the oscillation of v).
double relative_residual(const Grid& g, const MediumOnGrid& med, const GridFunction& v,
                         const std::vector<int>& cells);

}  // namespace fbh

#endif

#ifndef FBH_STENCIL_HPP
#define FBH_STENCIL_HPP

#include <vector>

#include "fbh/coefficients.hpp"
#include "fbh/grid.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// Coefficient samples at the cell centers of a concrete grid.
struct MediumOnGrid {
  Arr a11, a22, a12;  // a12 all-zero unless the field carries a mixed entry
  Arr qp2, qm2;       // Q+^2, Q-^2 at cell centers
  bool has_mixed = false;
};

MediumOnGrid sample_medium(const Grid& g, const CoefficientField& field);
/// Constant-coefficient medium (used for the homogenized functional).
MediumOnGrid constant_medium(const Grid& g, const Mat2& abar, double qp2, double qm2);

/// Discrete Dirichlet form
///   E(u) = sum_edges W_e (u_b - u_a)^2  (+ cell term 2 a12 gx gy h^dim),
/// where an edge in direction k gets W_e = (m/2) * harm(a_kk of the m adjacent
/// in-region cells) * h^(dim-2). Its Euler-Lagrange operator is the flux
/// stencil with harmonic face averaging (3-point in 1D, 5-point in 2D), so
/// discrete integration by parts holds exactly: E(u) = u . apply(u).
struct DirichletForm {
  Grid grid;
  bool periodic = false;
  Arr wx, wy;              // edge weights; wy empty in 1D
  Arr mixed;               // per-cell factor 2*a12*h^dim; empty when no mixed term
  std::vector<char> cell_mask;
  std::vector<char> node_active;

  /// Form over a cell subset of a box grid (Dirichlet-type problems).
  static DirichletForm box(const Grid& g, const MediumOnGrid& med,
                           const std::vector<int>& cells);
  /// Fully periodic form on the unit-cell grid (nodes_per_axis == cells_per_axis
  /// is emulated by wrapping the last node onto the first).
  static DirichletForm periodic_cell(const Grid& g, const MediumOnGrid& med);

  /// Externally supplied edge weights (transmission problems).
  static DirichletForm from_weights(const Grid& g, Arr wx, Arr wy,
                                    std::vector<char> cell_mask,
                                    std::vector<char> node_active);

  int x_edge_count() const;
  int y_edge_count() const;

  Vec apply(const Vec& u) const;        // A u  with E(u) = u^T A u
  double energy(const Vec& u) const;    // E(u)
  double bilinear(const Vec& u, const Vec& v) const;
  Arr diagonal() const;                 // diag(A), for Jacobi preconditioning

  /// Linear term of E(q.x + chi) as a nodal vector c, E = E(chi) + 2 c.chi + const.
  Vec plane_flux(const Vec2& q) const;

  /// Bilinear form of corrected planes, B(ei.x + chi_i, ej.x + chi_j); the
  /// affine parts enter through exact per-edge differences.
  double corrected_bilinear(const Vec2& ei, const Vec& chi_i, const Vec2& ej,
                            const Vec& chi_j) const;

  /// E(q.x) per unit volume of the active region (exact for the affine field).
  double plane_energy_density(const Vec2& q) const;
};

/// Node classification for a cell region: a node is active when it is a corner
/// of an in-region cell; it is interior when every cell touching it is in the
/// region and it is not on the box boundary.
struct RegionNodes {
  std::vector<char> active;
  std::vector<char> interior;   // active, surrounded by region cells, off the box edge
  std::vector<int> boundary;    // active but not interior (the Dirichlet layer)
};
RegionNodes classify_region_nodes(const Grid& g, const std::vector<char>& cell_mask);

}  // namespace fbh

#endif

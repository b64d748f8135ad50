#ifndef FBH_NORMS_HPP
#define FBH_NORMS_HPP

#include <cmath>
#include <vector>

#include "fbh/grid.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// Averaged L^p norm ((1/|B|) sum_{cells in B} |f|^p h^dim)^(1/p) of a per-cell
/// field. |B| is the summed volume of the member cells.
inline double avg_lp_norm_cells(const Grid& g, const Arr& cell_field, const Ball& ball,
                                double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigInvalid("avg_lp_norm: p must be finite and >= 1");
  const auto cells = cells_in_ball(g, ball);
  double acc = 0.0;
  for (int c : cells) acc += std::pow(std::abs(cell_field[c]), p);
  return std::pow(acc / static_cast<double>(cells.size()), 1.0 / p);
}

/// Averaged L^p norm of a nodal function; the cell value is the average of the
/// cell's corner nodes.
inline double avg_lp_norm(const GridFunction& f, const Ball& ball, double p) {
  return avg_lp_norm_cells(f.grid, cell_values(f), ball, p);
}

/// Pointwise norm |grad u| per cell from the cell-centered gradient.
inline Arr gradient_magnitude(const GridFunction& u) {
  const Eigen::MatrixXd g = cell_gradient(u);
  return g.rowwise().norm().array();
}

/// ||grad u||_{avg L^2(ball)} with cell-centered gradients.
inline double avg_gradient_l2(const GridFunction& u, const Ball& ball) {
  return avg_lp_norm_cells(u.grid, gradient_magnitude(u), ball, 2.0);
}

inline double avg_gradient_lp(const GridFunction& u, const Ball& ball, double p) {
  return avg_lp_norm_cells(u.grid, gradient_magnitude(u), ball, p);
}

/// sup over nodes in the ball of |f - g| style functionals.
template <typename F>
double sup_over_nodes(const Grid& g, const Ball& ball, F&& f) {
  double m = 0.0;
  bool any = false;
  for (int i = 0; i < g.node_count(); ++i) {
    if (!ball.contains(g.node_pos(i), g.dim)) continue;
    any = true;
    m = std::max(m, f(i));
  }
  if (!any) throw EmptyBall("sup_over_nodes: empty ball");
  return m;
}

inline double osc_over_nodes(const GridFunction& u, const Ball& ball) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < u.grid.node_count(); ++i) {
    if (!ball.contains(u.grid.node_pos(i), u.grid.dim)) continue;
    lo = std::min(lo, u.values[i]);
    hi = std::max(hi, u.values[i]);
  }
  if (!(hi >= lo)) throw EmptyBall("osc_over_nodes: empty ball");
  return hi - lo;
}

}  // namespace fbh

#endif

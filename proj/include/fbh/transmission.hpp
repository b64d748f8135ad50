#ifndef FBH_TRANSMISSION_HPP
#define FBH_TRANSMISSION_HPP

#include <vector>

#include "fbh/fitting.hpp"
#include "fbh/grid.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// Linearized two-phase transmission problem on the unit ball: harmonic in
/// each open half, continuous across {x_d = 0}, flux balance
/// (1+a^2) d+ w = a^2 d- w on the interface. alpha = +inf means globally
/// harmonic; inputs with alpha > 1e8 are routed there.
struct TransmissionProblem {
  double alpha = 1.0;
  bool infinite_alpha = false;
  Grid grid;              // must resolve {x_d = 0} as a node plane
  GridFunction boundary;  // Dirichlet data, read on the ring nodes

  static TransmissionProblem on_ball(double alpha, const GridFunction& h);
  static TransmissionProblem infinite(const GridFunction& h);
};

struct TransmissionSolution {
  GridFunction w;
  double alpha = 1.0;
  bool infinite_alpha = false;
  double gamma_plus = 0.0;   // d+ w(0), second-order one-sided
  double gamma_minus = 0.0;  // d- w(0)
  Vec2 tau = Vec2::Zero();   // horizontal gradient at 0 (zero in 1D)
  double interface_balance = 0.0;  // max over interface nodes of the first-order balance
};

TransmissionSolution solve_transmission(const TransmissionProblem& problem,
                                        double tol = 1e-10);

/// ||w_{alpha_k} - w_{alpha_*}||_inf for a sorted alpha list approaching a
/// limit slope (infinite_target routes the limit to the harmonic solver).
std::vector<double> transmission_continuity(const std::vector<double>& alphas,
                                            double target_alpha, bool infinite_target,
                                            const GridFunction& h);

/// Flat correction w_delta = (PSI_a(u) - x_d)/delta on the region; requires u
/// (alpha,delta)-flat there (throws NotFlat naming the violating node).
GridFunction flat_correction(const GridFunction& u, double alpha, double delta,
                             const Ball& region);

/// Smallest eta >= 0 with PHI_a(x_d + d w - eta d) <= u <= PHI_a(x_d + d w + eta d)
/// on B_{1/2}; w is recentered so w(0) = 0.
double expansion_residual(const GridFunction& u, double alpha, double delta,
                          const TransmissionSolution& w);

struct C11Fit {
  Vec2 tau = Vec2::Zero();
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  std::vector<double> radii;
  std::vector<double> defects;  // sup-norm defect of the fit per radius
  LogLogFit defect_fit;         // expected slope ~2
  double coeff_norm = 0.0;      // |tau| + |g+| + |g-|
  double w_inf = 0.0;           // ||w||_inf on B_1
};

/// Piecewise-linear expansion fit of a transmission solution around the
/// origin, per radius in the list.
C11Fit c11_fit(const TransmissionSolution& sol, const std::vector<double>& radii);

}  // namespace fbh

#endif

#ifndef FBH_HOMOG_HPP
#define FBH_HOMOG_HPP

#include <vector>

#include "fbh/elliptic.hpp"
#include "fbh/fitting.hpp"
#include "fbh/grid.hpp"
#include "fbh/minimize.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// Cutoff profile: 0 on (-inf,1], 1 on [2,inf), cubic smoothstep between.
double zeta(double s);
double zeta_prime(double s);

/// Grid distance to the union of the zero-level interface of u inside the ball
/// and the sphere itself, by Godunov fast sweeping with mesh size h.
GridFunction fb_distance(const GridFunction& u, const Ball& ball);

struct UpscaleResult {
  GridFunction ubar;
  GridFunction dist;       // the distance field used for the cutoff
  int sign_fallbacks = 0;  // nodes where the cutoff was zeroed to keep the sign
};

/// ubar = zeta(d/t) * (disc average of u over B_t) + (1 - zeta(d/t)) * u,
/// identical to u within distance t of the interface and of the sphere.
/// Throws ScaleTooLarge when t > r/2.
UpscaleResult upscale(const GridFunction& u, double t, const Ball& ball);

/// Energy of the cutoff strip {0 < d < 2t} against {0 < d < 3t}, the
/// intermediate inequality of the strip gradient bound.
struct StripBoundReport {
  double lhs = 0.0;  // int_{0<d<2t} |grad ubar|^2
  double rhs = 0.0;  // 9 int_{0<d<3t} |grad u|^2
  bool holds = false;
};
StripBoundReport strip_gradient_bound(const GridFunction& u, const GridFunction& ubar,
                                      const GridFunction& dist, double t,
                                      const Ball& ball);

/// Corrector dressing: u0 + chi(x) . grad u0(x) * zeta(d/t), with cell
/// gradients promoted to nodes by averaging. Throws ScaleTooLarge.
GridFunction downscale(const GridFunction& u0, const CorrectorSet& correctors, double t,
                       const Ball& ball);

struct HomErrorEntry {
  double r = 0.0;
  double J_of_u = 0.0;
  double J0_of_ubar = 0.0;
  double J0_of_u0 = 0.0;
  double J_of_u0tilde = 0.0;
  double defect_up = 0.0;    // (J0(ubar) - J0(u0)) / |B_r|
  double defect_down = 0.0;  // (J(u0tilde) - J(u)) / |B_r|
  double q_defect = 0.0;     // volume-term defect per |B_r|
};

struct HomErrorReport {
  std::vector<HomErrorEntry> entries;
  LogLogFit up_fit;     // slope of defect_up vs r (decay => negative)
  LogLogFit down_fit;   // slope of defect_down vs r
  LogLogFit total_fit;  // slope of defect_up + defect_down vs r
  Mat2 abar = Mat2::Identity();
  double qp2 = 0.0, qm2 = 0.0;
};

struct HomErrorParams {
  double gamma = 0.25;      // scale rules t = r^{2g/(2g+1)} and t = r^{g/(2+g)}
  double microscale = 4.0;  // radii below this are rejected
  double h = 0.25;
  MinimizeConfig minimize_cfg;
};

/// Per radius: minimize J on B_{2r}, upscale and evaluate J0; minimize J0 with
/// the same trace, downscale and evaluate J; report the sandwich defects per
/// unit volume and their fitted decay in r.
HomErrorReport hom_error_report(const CoefficientField& field,
                                const std::function<double(double, double)>& boundary,
                                const std::vector<double>& radii,
                                const HomErrorParams& params);

}  // namespace fbh

#endif

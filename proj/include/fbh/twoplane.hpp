#ifndef FBH_TWOPLANE_HPP
#define FBH_TWOPLANE_HPP

#include <cmath>
#include <vector>

#include "fbh/grid.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// Slope pair (alpha+, alpha-) of a general two-plane profile
/// PHI(t) = alpha+ max(0,t) + alpha- min(0,t).
struct SlopePair {
  double alpha_plus = 1.0;
  double alpha_minus = 0.0;

  static SlopePair from_alpha(double alpha) {
    return {std::sqrt(1.0 + alpha * alpha), alpha};
  }
  bool normalized(double tol = 1e-12) const {
    return std::abs(alpha_plus * alpha_plus - alpha_minus * alpha_minus - 1.0) <= tol;
  }
};

inline double phi(const SlopePair& p, double t) {
  return t > 0.0 ? p.alpha_plus * t : p.alpha_minus * t;
}
/// One-parameter family: PHI_alpha(t) = sqrt(1+alpha^2) t+ + alpha t-.
inline double phi(double alpha, double t) {
  return t > 0.0 ? std::sqrt(1.0 + alpha * alpha) * t : alpha * t;
}
/// Inverse of PHI_alpha; requires alpha > 0.
inline double psi(double alpha, double t) {
  if (!(alpha > 0.0)) throw DegenerateSlope("psi requires alpha > 0");
  return t > 0.0 ? t / std::sqrt(1.0 + alpha * alpha) : t / alpha;
}

/// Linearized transmission operator L_alpha(gamma+-) = (1+a^2) g+ - a^2 g-.
inline double l_alpha(double alpha, double gamma_p, double gamma_m) {
  return (1.0 + alpha * alpha) * gamma_p - alpha * alpha * gamma_m;
}

struct SlopeComposition {
  double alpha_prime;
  double lambda;
};

/// Scaling identity PHI_{alpha+-(1 +- delta gamma+-)}(z) = PHI_{alpha'}(lambda z):
/// lambda^2 = 1 + 2 d L + d^2((g+ + g-)L - g+ g-), alpha' = alpha (1+d g-)/lambda.
SlopeComposition compose_slopes(double alpha, double gamma_p, double gamma_m, double delta);

/// |PHI_{alpha+-(1 +- d g)}(z) - PHI_{alpha'}(lambda z)| at a sample point.
double compose_identity_defect(double alpha, double gamma_p, double gamma_m, double delta,
                               double z);

/// Tilted direction e = cos(d|tau|) e_d + sin(d|tau|) tau/|tau| for a
/// horizontal tau (last component zero).
Vec2 tilt_direction(const Vec2& tau, double delta, int dim = 2);

/// sup over nodes in B_1 of the defect in the slope-shift identity
///   x_d + d[P + g+ (x_d)+ - g- (x_d)-]
///     = (1+d g+)(x_d + dP)+ - (1+d g-)(x_d + dP)-  + O(d^2),
/// with (t)- = max(0,-t).
double verify_slope_shift(const GridFunction& P, double gamma_p, double gamma_m,
                          double delta);

/// Best two-plane fit on a ball: minimal delta with
/// PHI_a((x-c).nu - delta) <= u <= PHI_a((x-c).nu + delta) at every node,
/// where c is the ball center (profiles recentred to the interface anchor
/// their fits there).
struct TwoPlaneFit {
  double delta = 0.0;
  double alpha = 0.0;
  Vec2 nu = Vec2::Zero();
  bool achieved = true;  // false when the best slope sits on the search boundary
};

/// Sandwich width for a fixed (alpha, nu); +inf when alpha = 0 and u has
/// negative values (PHI_0 >= 0 cannot lie below them).
double flatness_delta(const GridFunction& u, const Ball& ball, double alpha,
                      const Vec2& nu);

/// Coarse direction/slope grid (64 angles in 2D, 2 signs in 1D; 40 log-spaced
/// alpha in [1e-2, 1e2] plus alpha = 0) refined by coordinate descent to
/// relative tolerance 1e-4. Slope ties within 1e-6 in delta resolve to the
/// largest alpha.
TwoPlaneFit measure_flatness(const GridFunction& u, const Ball& ball);

struct FlatStability {
  double eta;
  double ratio_defect;      // |sqrt(1+a0^2)/sqrt(1+a1^2) - 1|
  double direction_defect;  // |nu1 - e0|
  TwoPlaneFit fit;
};

/// eta = sup_{B_r} |PSI_{a0}(u) - x.e0| / r must be < 1/100 (else EtaTooLarge);
/// compares the measured fit on B_r against (a0, e0).
FlatStability flat_fit_stability(const GridFunction& u, double r, double alpha0,
                                 const Vec2& e0);

}  // namespace fbh

#endif

#ifndef FBH_REGULARITY_HPP
#define FBH_REGULARITY_HPP

#include <string>
#include <vector>

#include "fbh/elliptic.hpp"
#include "fbh/fitting.hpp"
#include "fbh/grid.hpp"
#include "fbh/twoplane.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// A quantity evaluated over increasing radii with its log-log fit.
struct ScaleProfile {
  std::vector<double> radii;
  std::vector<double> values;
  LogLogFit fit;

  void fit_now() { fit = loglog_fit(radii, values); }
};

struct GradientProfile {
  ScaleProfile ell;          // ell(r) = ||grad u||_{avg L2(B_r)}
  double lipschitz_ratio = 0.0;  // max_r ell(r) / (1 + ell(R))
};

GradientProfile gradient_profile(const GridFunction& u, const std::vector<double>& radii,
                                 const std::array<double, 2>& center = {0.0, 0.0});

struct FlatnessProfile {
  std::array<double, 2> center{0.0, 0.0};  // recentred origin (interface node)
  ScaleProfile flat_over_r;
  std::vector<double> alphas;
  std::vector<Vec2> nus;
  double osc_nu = 0.0;
  double osc_log_alpha = 0.0;
  bool alpha_degenerate = false;  // some scale returned alpha = 0
};

/// flat(u, B_r)/r, alpha(u, B_r), nu(u, B_r) over the radii, recentred to the
/// interface node nearest the origin. Throws NoInterface when u has no sign
/// change.
FlatnessProfile flatness_profile(const GridFunction& u, const std::vector<double>& radii);

struct DichotomyThresholds {
  double c1 = 0.1;
  double L0 = 4.0;
  double eta = 0.25;
};

enum class DichotomyTag { kBelowThreshold, kSlopeDecay, kFlatRegime };

struct DichotomyVerdict {
  DichotomyTag tag = DichotomyTag::kBelowThreshold;
  Vec2 xi = Vec2::Zero();
  DichotomyThresholds thresholds;
  double ell_R = 0.0;
  double ell_etaR = 0.0;
  double decay_ratio = 0.0;      // ell(eta R)/ell(R), slope-decay branch
  double flat_over_r = 0.0;      // flat(u, B_{2 eta R})/(2 eta R), flat branch
  double flat_alpha = 0.0;
  double lipschitz_ratio = 0.0;  // max ell(r)/(1+alpha) over dyadic r, flat branch
};

/// One dichotomy step: a-harmonic replacement, corrected-plane fit on B_{eta R}
/// vs B_R, then either the slope-decay or the flat-regime branch.
DichotomyVerdict dichotomy_step(const Grid& g, const MediumOnGrid& med,
                                const CorrectorSet& correctors, const GridFunction& u,
                                double R, const DichotomyThresholds& thresholds,
                                double microscale = 4.0);

struct LiouvilleStabilityRow {
  double r = 0.0;
  double eta = 0.0;
  double ratio_defect = 0.0;
  double direction_defect = 0.0;
  bool eta_admissible = false;  // eta < 1/100 so the bounds apply
};

struct LiouvilleFitResult {
  double alpha = 0.0;
  Vec2 e = Vec2::Zero();
  ScaleProfile deviation;  // D(r) = sup_{B_r} |PSI_a(u) - x.e| / r
  std::vector<LiouvilleStabilityRow> stability;
};

/// Fit (alpha, e) at the largest radius, report the sup-deviation profile and
/// the fit-stability cross-checks at the smaller radii. Throws NoNegativePhase
/// when u >= 0 on the largest ball.
LiouvilleFitResult liouville_fit(const GridFunction& u, const std::vector<double>& radii);

}  // namespace fbh

#endif

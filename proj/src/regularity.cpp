#include "fbh/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "fbh/minimize.hpp"
#include "fbh/norms.hpp"

namespace fbh {

GradientProfile gradient_profile(const GridFunction& u, const std::vector<double>& radii,
                                 const std::array<double, 2>& center) {
  if (radii.empty()) throw PreconditionViolated("gradient_profile: empty radii");
  GradientProfile out;
  for (double r : radii) {
    out.ell.radii.push_back(r);
    out.ell.values.push_back(avg_gradient_l2(u, Ball(center, r)));
  }
  out.ell.fit_now();
  const double ellR = out.ell.values.back();
  for (double v : out.ell.values)
    out.lipschitz_ratio = std::max(out.lipschitz_ratio, v / (1.0 + ellR));
  return out;
}

namespace {

// Interface node nearest the origin: endpoint of a sign-change edge (zero set
// counted with the minus phase) minimizing |x|.
std::array<double, 2> recenter_to_interface(const GridFunction& u) {
  const Grid& g = u.grid;
  const int n = g.nodes_per_axis;
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 2> center{0.0, 0.0};
  bool found = false;
  auto consider = [&](int a, int b) {
    const bool pa = u.values[a] > 0.0, pb = u.values[b] > 0.0;
    if (pa == pb) return;
    for (int i : {a, b}) {
      const auto p = g.node_pos(i);
      const double d2 = p[0] * p[0] + (g.dim == 2 ? p[1] * p[1] : 0.0);
      if (d2 < best) {
        best = d2;
        center = p;
        found = true;
      }
    }
  };
  if (g.dim == 1) {
    for (int i = 0; i + 1 < n; ++i) consider(i, i + 1);
  } else {
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = g.node_index(ix, iy);
        if (ix + 1 < n) consider(i, i + 1);
        if (iy + 1 < n) consider(i, i + n);
      }
  }
  if (!found) throw NoInterface("flatness_profile: u has an empty zero set");
  return center;
}

}  // namespace

FlatnessProfile flatness_profile(const GridFunction& u, const std::vector<double>& radii) {
  if (radii.empty()) throw PreconditionViolated("flatness_profile: empty radii");
  FlatnessProfile out;
  out.center = recenter_to_interface(u);
  for (double r : radii) {
    const TwoPlaneFit fit = measure_flatness(u, Ball(out.center, r));
    out.flat_over_r.radii.push_back(r);
    out.flat_over_r.values.push_back(fit.delta / r);
    out.alphas.push_back(fit.alpha);
    out.nus.push_back(fit.nu);
    if (fit.alpha <= 0.0) out.alpha_degenerate = true;
  }
  out.flat_over_r.fit_now();
  for (size_t i = 0; i < out.nus.size(); ++i)
    for (size_t j = i + 1; j < out.nus.size(); ++j) {
      out.osc_nu = std::max(out.osc_nu, (out.nus[i] - out.nus[j]).norm());
      if (out.alphas[i] > 0.0 && out.alphas[j] > 0.0)
        out.osc_log_alpha = std::max(
            out.osc_log_alpha, std::abs(std::log(out.alphas[i]) - std::log(out.alphas[j])));
    }
  return out;
}

DichotomyVerdict dichotomy_step(const Grid& g, const MediumOnGrid& med,
                                const CorrectorSet& correctors, const GridFunction& u,
                                double R, const DichotomyThresholds& thresholds,
                                double microscale) {
  DichotomyVerdict v;
  v.thresholds = thresholds;
  v.ell_R = avg_gradient_l2(u, Ball(R));
  if (v.ell_R < thresholds.L0) {
    v.tag = DichotomyTag::kBelowThreshold;
    return v;
  }
  const GridFunction repl = harmonic_replacement(g, med, u, cells_in_ball(g, Ball(R)));
  const double etaR = thresholds.eta * R;
  const AlFit fit = al_linear_fit(g, med, repl, std::max(1.0, etaR), R, correctors);
  v.xi = fit.xi;
  v.ell_etaR = avg_gradient_l2(u, Ball(etaR));
  if (fit.xi.norm() <= thresholds.c1 * v.ell_R) {
    v.tag = DichotomyTag::kSlopeDecay;
    v.decay_ratio = v.ell_etaR / v.ell_R;
    return v;
  }
  v.tag = DichotomyTag::kFlatRegime;
  const double r2 = 2.0 * etaR;
  const TwoPlaneFit flat = measure_flatness(u, Ball(r2));
  v.flat_over_r = flat.delta / r2;
  v.flat_alpha = flat.alpha;
  double r = std::max(microscale, g.h * 16.0);
  double worst = 0.0;
  while (r <= etaR * 1.0000001) {
    worst = std::max(worst, avg_gradient_l2(u, Ball(r)) / (1.0 + flat.alpha));
    r *= 2.0;
  }
  v.lipschitz_ratio = worst;
  return v;
}

LiouvilleFitResult liouville_fit(const GridFunction& u, const std::vector<double>& radii) {
  if (radii.empty()) throw PreconditionViolated("liouville_fit: empty radii");
  std::vector<double> rs = radii;
  std::sort(rs.begin(), rs.end());
  const double rmax = rs.back();

  bool has_negative = false;
  for (int i = 0; i < u.grid.node_count(); ++i) {
    if (!Ball(rmax).contains(u.grid.node_pos(i), u.grid.dim)) continue;
    if (u.values[i] < 0.0) {
      has_negative = true;
      break;
    }
  }
  if (!has_negative)
    throw NoNegativePhase("liouville_fit: no negative phase inside the largest ball");

  LiouvilleFitResult out;
  const TwoPlaneFit top = measure_flatness(u, Ball(rmax));
  out.alpha = top.alpha;
  out.e = top.nu;
  if (!(out.alpha > 0.0))
    throw NoNegativePhase("liouville_fit: degenerate slope fit despite negative phase");

  for (double r : rs) {
    double sup = 0.0;
    for (int i = 0; i < u.grid.node_count(); ++i) {
      const auto p = u.grid.node_pos(i);
      if (!Ball(r).contains(p, u.grid.dim)) continue;
      const double s = p[0] * out.e[0] + (u.grid.dim == 2 ? p[1] * out.e[1] : 0.0);
      sup = std::max(sup, std::abs(psi(out.alpha, u.values[i]) - s));
    }
    out.deviation.radii.push_back(r);
    out.deviation.values.push_back(sup / r);

    LiouvilleStabilityRow row;
    row.r = r;
    row.eta = sup / r;
    row.eta_admissible = row.eta < 0.01;
    if (row.eta_admissible) {
      const FlatStability st = flat_fit_stability(u, r, out.alpha, out.e);
      row.ratio_defect = st.ratio_defect;
      row.direction_defect = st.direction_defect;
    }
    out.stability.push_back(row);
  }
  out.deviation.fit_now();
  return out;
}

}  // namespace fbh

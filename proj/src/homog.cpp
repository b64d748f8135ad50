#include "fbh/homog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbh/norms.hpp"

namespace fbh {

double zeta(double s) {
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  const double t = s - 1.0;
  return t * t * (3.0 - 2.0 * t);
}

double zeta_prime(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 6.0 * t * (1.0 - t);
}

namespace {

constexpr double kBig = std::numeric_limits<double>::max() / 4.0;

// Godunov eikonal update from the current neighbor values.
double eikonal_update(double a, double b, double h, int dim) {
  if (dim == 1) return a + h;
  const double lo = std::min(a, b), hi = std::max(a, b);
  if (hi - lo >= h) return lo + h;
  return 0.5 * (a + b + std::sqrt(2.0 * h * h - (a - b) * (a - b)));
}

}  // namespace

GridFunction fb_distance(const GridFunction& u, const Ball& ball) {
  const Grid& g = u.grid;
  const int n = g.nodes_per_axis;
  GridFunction d(g);
  std::vector<char> fixed(g.node_count(), 0);

  auto sgn_plus = [&](int i) { return u.values[i] > 0.0; };

  // Sources: everything on or outside the sphere, and both endpoints of any
  // sign-change edge inside the ball.
  for (int i = 0; i < g.node_count(); ++i) {
    if (!ball.contains(g.node_pos(i), g.dim)) {
      d.values[i] = 0.0;
      fixed[i] = 1;
    } else {
      d.values[i] = kBig;
    }
  }
  auto mark_edge = [&](int a, int b) {
    if (fixed[a] && fixed[b]) return;
    const bool ain = ball.contains(g.node_pos(a), g.dim);
    const bool bin = ball.contains(g.node_pos(b), g.dim);
    if (!ain || !bin) return;
    if (sgn_plus(a) != sgn_plus(b)) {
      d.values[a] = 0.0;
      d.values[b] = 0.0;
      fixed[a] = fixed[b] = 1;
    }
  };
  if (g.dim == 1) {
    for (int i = 0; i + 1 < n; ++i) mark_edge(i, i + 1);
  } else {
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = g.node_index(ix, iy);
        if (ix + 1 < n) mark_edge(i, i + 1);
        if (iy + 1 < n) mark_edge(i, i + n);
      }
  }

  // Fast sweeping until stable.
  const double h = g.h;
  for (int round = 0; round < 16; ++round) {
    double change = 0.0;
    for (int sweep = 0; sweep < (g.dim == 1 ? 2 : 4); ++sweep) {
      const bool xup = sweep % 2 == 0;
      const bool yup = sweep / 2 == 0;
      for (int jy = 0; jy < (g.dim == 1 ? 1 : n); ++jy) {
        const int iy = yup ? jy : n - 1 - jy;
        for (int jx = 0; jx < n; ++jx) {
          const int ix = xup ? jx : n - 1 - jx;
          const int i = g.dim == 1 ? ix : g.node_index(ix, iy);
          if (fixed[i]) continue;
          const double dw = ix > 0 ? d.values[i - 1] : kBig;
          const double de = ix < n - 1 ? d.values[i + 1] : kBig;
          double cand;
          if (g.dim == 1) {
            cand = eikonal_update(std::min(dw, de), 0.0, h, 1);
          } else {
            const double ds = iy > 0 ? d.values[i - n] : kBig;
            const double dn = iy < n - 1 ? d.values[i + n] : kBig;
            cand = eikonal_update(std::min(dw, de), std::min(ds, dn), h, 2);
          }
          if (cand < d.values[i]) {
            change = std::max(change, d.values[i] - cand);
            d.values[i] = cand;
          }
        }
      }
    }
    if (change < 1e-12 * h) break;
  }
  for (int i = 0; i < g.node_count(); ++i)
    if (d.values[i] >= kBig) d.values[i] = 0.0;  // isolated; treat as boundary
  return d;
}

UpscaleResult upscale(const GridFunction& u, double t, const Ball& ball) {
  if (t > ball.radius / 2.0)
    throw ScaleTooLarge("upscale: t must be <= r/2");
  if (!(t > 0.0)) throw PreconditionViolated("upscale: t must be positive");
  const Grid& g = u.grid;
  UpscaleResult res;
  res.dist = fb_distance(u, ball);
  res.ubar = u;

  // Disc offsets for the averaging ball, symmetric by construction.
  const int reach = static_cast<int>(std::floor(t / g.h));
  std::vector<std::pair<int, int>> offs;
  for (int dy = g.dim == 1 ? 0 : -reach; dy <= (g.dim == 1 ? 0 : reach); ++dy)
    for (int dx = -reach; dx <= reach; ++dx)
      if ((dx * dx + dy * dy) * g.h * g.h <= t * t) offs.push_back({dx, dy});

  const int n = g.nodes_per_axis;
  for (int i = 0; i < g.node_count(); ++i) {
    const double z = zeta(res.dist.values[i] / t);
    if (z <= 0.0) continue;
    const int ix = g.dim == 1 ? i : i % n;
    const int iy = g.dim == 1 ? 0 : i / n;
    double acc = 0.0;
    int cnt = 0;
    for (const auto& [dx, dy] : offs) {
      const int jx = ix + dx, jy = iy + dy;
      if (jx < 0 || jx >= n || (g.dim == 2 && (jy < 0 || jy >= n))) continue;
      acc += u.values[g.dim == 1 ? jx : g.node_index(jx, jy)];
      ++cnt;
    }
    if (cnt == 0) continue;
    const double xi = acc / cnt;
    const double mixed = z * xi + (1.0 - z) * u.values[i];
    const bool sign_u = u.values[i] > 0.0;
    const bool sign_m = mixed > 0.0;
    if (sign_u != sign_m) {
      ++res.sign_fallbacks;  // keep the original value, the cutoff promised d >= t
      continue;
    }
    res.ubar.values[i] = mixed;
  }
  return res;
}

StripBoundReport strip_gradient_bound(const GridFunction& u, const GridFunction& ubar,
                                      const GridFunction& dist, double t,
                                      const Ball& ball) {
  const Grid& g = u.grid;
  const Arr dcell = cell_values(dist);
  const Eigen::MatrixXd gu = cell_gradient(u);
  const Eigen::MatrixXd gub = cell_gradient(ubar);
  const double hd = g.cell_volume();
  StripBoundReport rep;
  for (int c : cells_in_ball(g, ball)) {
    if (dcell[c] > 0.0 && dcell[c] < 2.0 * t) rep.lhs += gub.row(c).squaredNorm() * hd;
    if (dcell[c] > 0.0 && dcell[c] < 3.0 * t) rep.rhs += gu.row(c).squaredNorm() * hd;
  }
  rep.rhs *= 9.0;
  const double slack = 10.0 * g.h * (1.0 + rep.rhs);
  rep.holds = rep.lhs <= rep.rhs + slack;
  return rep;
}

GridFunction downscale(const GridFunction& u0, const CorrectorSet& correctors, double t,
                       const Ball& ball) {
  if (t > ball.radius / 2.0)
    throw ScaleTooLarge("downscale: t must be <= r/2");
  const Grid& g = u0.grid;
  const GridFunction d = fb_distance(u0, ball);
  const Eigen::MatrixXd gc = cell_gradient(u0);
  const int n = g.nodes_per_axis, m = g.cells_per_axis;

  GridFunction out = u0;
  for (int i = 0; i < g.node_count(); ++i) {
    const double z = zeta(d.values[i] / t);
    if (z <= 0.0) continue;
    // node gradient: average of the adjacent cell gradients
    const int ix = g.dim == 1 ? i : i % n;
    const int iy = g.dim == 1 ? 0 : i / n;
    double gx = 0.0, gy = 0.0;
    int cnt = 0;
    for (int cy = (g.dim == 1 ? 0 : iy - 1); cy <= (g.dim == 1 ? 0 : iy); ++cy)
      for (int cx = ix - 1; cx <= ix; ++cx) {
        if (cx < 0 || cx >= m || (g.dim == 2 && (cy < 0 || cy >= m))) continue;
        const int c = g.dim == 1 ? cx : g.cell_index(cx, cy);
        gx += gc(c, 0);
        if (g.dim == 2) gy += gc(c, 1);
        ++cnt;
      }
    if (cnt == 0) continue;
    gx /= cnt;
    gy /= cnt;
    const auto p = g.node_pos(i);
    double corr = correctors.chi_at(0, p[0], p[1]) * gx;
    if (g.dim == 2) corr += correctors.chi_at(1, p[0], p[1]) * gy;
    out.values[i] += corr * z;
  }
  return out;
}

HomErrorReport hom_error_report(const CoefficientField& field,
                                const std::function<double(double, double)>& boundary,
                                const std::vector<double>& radii,
                                const HomErrorParams& params) {
  for (double r : radii)
    if (r < params.microscale)
      throw RadiiBelowMicroscale("hom_error_report: radius " + std::to_string(r) +
                                 " below the configured microscale");

  const CorrectorSet correctors = solve_correctors(field);
  const HomogenizedMatrix hom = homogenized_matrix(field, correctors);
  HomErrorReport rep;
  rep.abar = hom.abar;
  rep.qp2 = field.mean_qplus_sq();
  rep.qm2 = field.mean_qminus_sq();

  std::vector<double> rs, ups, downs, totals;
  for (double r : radii) {
    const Grid g(field.dim, 2.0 * r, params.h);
    const MediumOnGrid med = sample_medium(g, field);
    const GridFunction gdata = GridFunction::sample(g, boundary);

    const auto cells2r = cells_in_ball(g, Ball(2.0 * r));
    MinimizeConfig cfg = params.minimize_cfg;
    const MinimizerResult min_u = minimize(g, med, gdata, cells2r, cfg);

    const Ball br(r);
    const auto cellsr = cells_in_ball(g, br);
    const double vol = static_cast<double>(cellsr.size()) * g.cell_volume();

    HomErrorEntry e;
    e.r = r;
    e.J_of_u = energy(g, med, min_u.u, cellsr).total;

    const double gamma = params.gamma;
    const double t_up = std::min(std::pow(r, 2.0 * gamma / (2.0 * gamma + 1.0)), r / 2.0);
    const UpscaleResult up = upscale(min_u.u, t_up, br);

    const MediumOnGrid med0 = constant_medium(g, hom.abar, rep.qp2, rep.qm2);
    const EnergyBreakdown e0b = energy(g, med0, up.ubar, cellsr);
    e.J0_of_ubar = e0b.total;

    const MinimizerResult min_u0 = minimize(g, med0, up.ubar, cellsr, cfg);
    e.J0_of_u0 = energy(g, med0, min_u0.u, cellsr).total;

    const double t_dn = std::min(std::pow(r, gamma / (2.0 + gamma)), r / 2.0);
    const GridFunction util = downscale(min_u0.u, correctors, t_dn, br);
    e.J_of_u0tilde = energy(g, med, util, cellsr).total;

    e.defect_up = (e.J0_of_ubar - e.J0_of_u0) / vol;
    e.defect_down = (e.J_of_u0tilde - e.J_of_u) / vol;

    // Volume-term defect against the homogenized q's.
    const EnergyBreakdown het = energy(g, med, min_u.u, cellsr);
    const Arr cv = cell_values(min_u.u);
    double vol_plus = 0.0, vol_minus = 0.0;
    for (int c : cellsr)
      (cv[c] > 0.0 ? vol_plus : vol_minus) += g.cell_volume();
    e.q_defect = (std::abs(het.volume_plus - rep.qp2 * vol_plus) +
                  std::abs(het.volume_minus - rep.qm2 * vol_minus)) /
                 vol;

    rep.entries.push_back(e);
    rs.push_back(r);
    ups.push_back(std::max(std::abs(e.defect_up), 1e-14));
    downs.push_back(std::max(std::abs(e.defect_down), 1e-14));
    totals.push_back(std::max(std::abs(e.defect_up) + std::abs(e.defect_down), 1e-14));
  }
  rep.up_fit = loglog_fit(rs, ups);
  rep.down_fit = loglog_fit(rs, downs);
  rep.total_fit = loglog_fit(rs, totals);
  return rep;
}

}  // namespace fbh

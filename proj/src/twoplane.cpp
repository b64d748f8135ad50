#include "fbh/twoplane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbh {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double xd_of(const std::array<double, 2>& p, int dim) { return dim == 1 ? p[0] : p[1]; }
}  // namespace

SlopeComposition compose_slopes(double alpha, double gamma_p, double gamma_m,
                                double delta) {
  if (!(alpha > 0.0)) throw DegenerateSlope("compose_slopes requires alpha > 0");
  if (!(1.0 + delta * gamma_m > 0.0))
    throw InvalidComposition("compose_slopes: 1 + delta*gamma- must be positive");
  const double L = l_alpha(alpha, gamma_p, gamma_m);
  const double lam2 =
      1.0 + 2.0 * delta * L + delta * delta * ((gamma_p + gamma_m) * L - gamma_p * gamma_m);
  if (!(lam2 > 0.0)) throw InvalidComposition("compose_slopes: lambda^2 <= 0");
  const double lambda = std::sqrt(lam2);
  return {alpha * (1.0 + delta * gamma_m) / lambda, lambda};
}

double compose_identity_defect(double alpha, double gamma_p, double gamma_m, double delta,
                               double z) {
  const SlopeComposition c = compose_slopes(alpha, gamma_p, gamma_m, delta);
  const SlopePair scaled{std::sqrt(1.0 + alpha * alpha) * (1.0 + delta * gamma_p),
                         alpha * (1.0 + delta * gamma_m)};
  return std::abs(phi(scaled, z) - phi(c.alpha_prime, c.lambda * z));
}

Vec2 tilt_direction(const Vec2& tau, double delta, int dim) {
  if (dim != 2) throw PreconditionViolated("tilt_direction: defined for dim = 2");
  if (std::abs(tau[1]) > 1e-14)
    throw PreconditionViolated("tilt_direction: tau must be horizontal");
  const double norm = std::abs(tau[0]);
  if (norm == 0.0) throw ZeroTau("tilt_direction: |tau| = 0");
  if (!(delta * norm < kPi / 2.0))
    throw PreconditionViolated("tilt_direction: delta*|tau| must be < pi/2");
  Vec2 e;
  e[0] = std::sin(delta * norm) * tau[0] / norm;
  e[1] = std::cos(delta * norm);
  return e;
}

double verify_slope_shift(const GridFunction& P, double gamma_p, double gamma_m,
                          double delta) {
  const Grid& g = P.grid;
  const Ball b(1.0);
  double worst = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_pos(i);
    if (!b.contains(p, g.dim)) continue;
    const double xd = xd_of(p, g.dim);
    const double lhs =
        xd + delta * (P.values[i] + gamma_p * pos_part(xd) - gamma_m * neg_part(xd));
    const double y = xd + delta * P.values[i];
    const double rhs = (1.0 + delta * gamma_p) * pos_part(y) -
                       (1.0 + delta * gamma_m) * neg_part(y);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double flatness_delta(const GridFunction& u, const Ball& ball, double alpha,
                      const Vec2& nu) {
  const Grid& g = u.grid;
  double need = 0.0;
  if (alpha > 0.0) {
    for (int i = 0; i < g.node_count(); ++i) {
      const auto p = g.node_pos(i);
      if (!ball.contains(p, g.dim)) continue;
      const double s = (p[0] - ball.center[0]) * nu[0] +
                       (g.dim == 2 ? (p[1] - ball.center[1]) * nu[1] : 0.0);
      need = std::max(need, std::abs(psi(alpha, u.values[i]) - s));
    }
    return need;
  }
  // alpha = 0: PHI_0(t) = max(0, t).
  for (int i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_pos(i);
    if (!ball.contains(p, g.dim)) continue;
    const double s = (p[0] - ball.center[0]) * nu[0] +
                     (g.dim == 2 ? (p[1] - ball.center[1]) * nu[1] : 0.0);
    const double v = u.values[i];
    if (v < 0.0) return kInf;       // lower barrier max(0, s-delta) >= 0 > v
    need = std::max(need, s - v);   // lower: s - delta <= v
    if (v > 0.0) need = std::max(need, v - s);  // upper: v <= max(0, s+delta)
  }
  return std::max(need, 0.0);
}

namespace {

struct Candidate {
  double alpha, theta, delta;
};

// Compact node list so the search loops touch contiguous data.
struct BallNodes {
  std::vector<double> x, y, v;
  int dim;
};

BallNodes collect_nodes(const GridFunction& u, const Ball& ball) {
  BallNodes bn;
  bn.dim = u.grid.dim;
  for (int i = 0; i < u.grid.node_count(); ++i) {
    const auto p = u.grid.node_pos(i);
    if (!ball.contains(p, u.grid.dim)) continue;
    bn.x.push_back(p[0] - ball.center[0]);
    bn.y.push_back(u.grid.dim == 2 ? p[1] - ball.center[1] : 0.0);
    bn.v.push_back(u.values[i]);
  }
  return bn;
}

double delta_on_nodes(const BallNodes& bn, double alpha, const Vec2& nu) {
  const size_t n = bn.v.size();
  double need = 0.0;
  if (alpha > 0.0) {
    const double ip = 1.0 / std::sqrt(1.0 + alpha * alpha);
    const double im = 1.0 / alpha;
    for (size_t i = 0; i < n; ++i) {
      const double s = bn.x[i] * nu[0] + (bn.dim == 2 ? bn.y[i] * nu[1] : 0.0);
      const double w = bn.v[i];
      const double d = std::abs((w > 0.0 ? w * ip : w * im) - s);
      if (d > need) need = d;
    }
    return need;
  }
  for (size_t i = 0; i < n; ++i) {
    const double s = bn.x[i] * nu[0] + (bn.dim == 2 ? bn.y[i] * nu[1] : 0.0);
    const double w = bn.v[i];
    if (w < 0.0) return kInf;
    need = std::max(need, s - w);
    if (w > 0.0) need = std::max(need, w - s);
  }
  return std::max(need, 0.0);
}

struct SearchState {
  const BallNodes& nodes;
  std::vector<Candidate> evaluated;
  double best_delta = kInf;
  double best_alpha = 0.0;
  double best_theta = 0.0;
  int dim;
};

Vec2 dir_of(double theta, int dim) {
  if (dim == 1) return Vec2(theta >= 0 ? 1.0 : -1.0, 0.0);
  return Vec2(std::cos(theta), std::sin(theta));
}

double eval(SearchState& st, double alpha, double theta) {
  const double d = delta_on_nodes(st.nodes, alpha, dir_of(theta, st.dim));
  if (d < st.best_delta) {
    st.best_delta = d;
    st.best_alpha = alpha;
    st.best_theta = theta;
  }
  if (std::isfinite(d)) st.evaluated.push_back({alpha, theta, d});
  return d;
}

// Deterministic ternary search over a scalar coordinate.
template <typename F>
double ternary_min(F&& f, double lo, double hi, int iters) {
  for (int k = 0; k < iters; ++k) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TwoPlaneFit measure_flatness(const GridFunction& u, const Ball& ball) {
  const Grid& g = u.grid;
  if (static_cast<int>(cells_in_ball(g, ball).size()) < 100)
    throw PreconditionViolated("measure_flatness: ball must contain >= 100 cells");
  constexpr double kAlphaLo = 1e-2, kAlphaHi = 1e2;
  constexpr int kAlphaCount = 40;
  const int n_dirs = g.dim == 1 ? 2 : 64;

  const BallNodes nodes = collect_nodes(u, ball);
  SearchState st{nodes, {}, kInf, 0.0, 0.0, g.dim};

  std::vector<double> alphas;
  alphas.push_back(0.0);
  for (int k = 0; k < kAlphaCount; ++k)
    alphas.push_back(kAlphaLo * std::pow(kAlphaHi / kAlphaLo,
                                         static_cast<double>(k) / (kAlphaCount - 1)));
  std::vector<double> thetas;
  if (g.dim == 1) {
    thetas = {1.0, -1.0};
  } else {
    for (int k = 0; k < n_dirs; ++k) thetas.push_back(2.0 * kPi * k / n_dirs);
  }

  for (double th : thetas)
    for (double a : alphas) eval(st, a, th);

  // Coordinate-descent refinement, alternating slope and direction brackets.
  const double alpha_step = std::pow(kAlphaHi / kAlphaLo, 1.0 / (kAlphaCount - 1));
  double prev = st.best_delta;
  for (int round = 0; round < 6; ++round) {
    if (st.best_alpha > 0.0) {
      const double la = std::log(st.best_alpha);
      const double lo = std::max(std::log(kAlphaLo), la - std::log(alpha_step));
      const double hi = std::min(std::log(kAlphaHi), la + std::log(alpha_step));
      ternary_min([&](double l) { return eval(st, std::exp(l), st.best_theta); }, lo, hi,
                  16);
    }
    if (g.dim == 2) {
      const double width = 2.0 * kPi / n_dirs / std::pow(2.0, round);
      ternary_min([&](double t) { return eval(st, st.best_alpha, t); },
                  st.best_theta - width, st.best_theta + width, 16);
    }
    if (prev - st.best_delta <= 1e-4 * std::max(prev, 1e-300) && round >= 1) break;
    prev = st.best_delta;
  }

  // Maximal-slope tie rule on the evaluated family.
  double alpha_out = st.best_alpha, theta_out = st.best_theta;
  for (const auto& c : st.evaluated) {
    if (c.delta <= st.best_delta + 1e-6 && c.alpha > alpha_out) {
      alpha_out = c.alpha;
      theta_out = c.theta;
    }
  }

  TwoPlaneFit fit;
  fit.delta = flatness_delta(u, ball, alpha_out, dir_of(theta_out, g.dim));
  fit.alpha = alpha_out;
  fit.nu = dir_of(theta_out, g.dim);
  fit.achieved = alpha_out > kAlphaLo * 1.0000001 && alpha_out < kAlphaHi * 0.9999999;
  return fit;
}

FlatStability flat_fit_stability(const GridFunction& u, double r, double alpha0,
                                 const Vec2& e0) {
  if (!(alpha0 > 0.0)) throw DegenerateSlope("flat_fit_stability: alpha0 must be > 0");
  const Grid& g = u.grid;
  const Ball ball(r);
  double sup = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_pos(i);
    if (!ball.contains(p, g.dim)) continue;
    const double s = p[0] * e0[0] + (g.dim == 2 ? p[1] * e0[1] : 0.0);
    sup = std::max(sup, std::abs(psi(alpha0, u.values[i]) - s));
  }
  FlatStability out;
  out.eta = sup / r;
  if (out.eta >= 0.01)
    throw EtaTooLarge("flat_fit_stability: eta = " + std::to_string(out.eta));
  out.fit = measure_flatness(u, ball);
  const double a1 = out.fit.alpha;
  out.ratio_defect = std::abs(std::sqrt(1.0 + alpha0 * alpha0) / std::sqrt(1.0 + a1 * a1) - 1.0);
  out.direction_defect = (out.fit.nu - e0).norm();
  return out;
}

}  // namespace fbh

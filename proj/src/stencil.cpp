#include "fbh/stencil.hpp"

#include <cmath>

namespace fbh {

MediumOnGrid sample_medium(const Grid& g, const CoefficientField& field) {
  if (g.dim != field.dim) throw ConfigInvalid("sample_medium: dim mismatch");
  MediumOnGrid m;
  const int nc = g.cell_count();
  m.a11.resize(nc);
  m.a22.resize(nc);
  m.a12.resize(nc);
  m.qp2.resize(nc);
  m.qm2.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto p = g.cell_center(c);
    const int k = field.table_index(p[0], p[1]);
    m.a11[c] = field.a11[k];
    m.a22[c] = g.dim == 2 ? field.a22[k] : 0.0;
    m.a12[c] = g.dim == 2 ? field.a12[k] : 0.0;
    const double qp = field.qplus[k], qm = field.qminus[k];
    m.qp2[c] = qp * qp;
    m.qm2[c] = qm * qm;
  }
  m.has_mixed = g.dim == 2 && (m.a12.abs() > 1e-300).any();
  return m;
}

MediumOnGrid constant_medium(const Grid& g, const Mat2& abar, double qp2, double qm2) {
  MediumOnGrid m;
  const int nc = g.cell_count();
  m.a11 = Arr::Constant(nc, abar(0, 0));
  m.a22 = Arr::Constant(nc, g.dim == 2 ? abar(1, 1) : 0.0);
  m.a12 = Arr::Constant(nc, g.dim == 2 ? abar(0, 1) : 0.0);
  m.qp2 = Arr::Constant(nc, qp2);
  m.qm2 = Arr::Constant(nc, qm2);
  m.has_mixed = g.dim == 2 && std::abs(abar(0, 1)) > 1e-300;
  return m;
}

namespace {

inline double harm2(double a, double b) { return 2.0 * a * b / (a + b); }

}  // namespace

int DirichletForm::x_edge_count() const {
  const int n = grid.nodes_per_axis, m = grid.cells_per_axis;
  if (periodic) return grid.dim == 1 ? m : m * m;
  return grid.dim == 1 ? m : m * n;
}

int DirichletForm::y_edge_count() const {
  const int n = grid.nodes_per_axis, m = grid.cells_per_axis;
  if (grid.dim == 1) return 0;
  return periodic ? m * m : n * m;
}

DirichletForm DirichletForm::box(const Grid& g, const MediumOnGrid& med,
                                 const std::vector<int>& cells) {
  DirichletForm f;
  f.grid = g;
  f.periodic = false;
  f.cell_mask.assign(g.cell_count(), 0);
  for (int c : cells) f.cell_mask[c] = 1;
  f.node_active.assign(g.node_count(), 0);

  const int m = g.cells_per_axis, n = g.nodes_per_axis;
  const double hpow = std::pow(g.h, g.dim - 2);

  if (g.dim == 1) {
    f.wx = Arr::Zero(m);
    for (int c : cells) {
      f.wx[c] = med.a11[c] * hpow;
      f.node_active[c] = f.node_active[c + 1] = 1;
    }
    return f;
  }

  for (int c : cells) {
    const int cx = c % m, cy = c / m;
    f.node_active[g.node_index(cx, cy)] = 1;
    f.node_active[g.node_index(cx + 1, cy)] = 1;
    f.node_active[g.node_index(cx, cy + 1)] = 1;
    f.node_active[g.node_index(cx + 1, cy + 1)] = 1;
  }

  // x-edges indexed ix + m*iy, ix in [0,m), iy in [0,n): from (ix,iy) to (ix+1,iy).
  f.wx = Arr::Zero(m * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      int cnt = 0;
      double inv_sum = 0.0;
      if (iy > 0 && f.cell_mask[g.cell_index(ix, iy - 1)]) {
        ++cnt;
        inv_sum += 1.0 / med.a11[g.cell_index(ix, iy - 1)];
      }
      if (iy < m && f.cell_mask[g.cell_index(ix, iy)]) {
        ++cnt;
        inv_sum += 1.0 / med.a11[g.cell_index(ix, iy)];
      }
      if (cnt > 0) f.wx[ix + m * iy] = 0.5 * cnt * (cnt / inv_sum) * hpow;
    }

  // y-edges indexed ix + n*iy, ix in [0,n), iy in [0,m): from (ix,iy) to (ix,iy+1).
  f.wy = Arr::Zero(n * m);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      int cnt = 0;
      double inv_sum = 0.0;
      if (ix > 0 && f.cell_mask[g.cell_index(ix - 1, iy)]) {
        ++cnt;
        inv_sum += 1.0 / med.a22[g.cell_index(ix - 1, iy)];
      }
      if (ix < m && f.cell_mask[g.cell_index(ix, iy)]) {
        ++cnt;
        inv_sum += 1.0 / med.a22[g.cell_index(ix, iy)];
      }
      if (cnt > 0) f.wy[ix + n * iy] = 0.5 * cnt * (cnt / inv_sum) * hpow;
    }

  if (med.has_mixed) {
    f.mixed = Arr::Zero(g.cell_count());
    const double hd = g.cell_volume();
    for (int c : cells) f.mixed[c] = 2.0 * med.a12[c] * hd;
  }
  return f;
}

DirichletForm DirichletForm::periodic_cell(const Grid& g, const MediumOnGrid& med) {
  // Periodic forms live on a grid whose last node duplicates the first; the
  // duplicate column/row is never referenced (wrapping uses index % m).
  DirichletForm f;
  f.grid = g;
  f.periodic = true;
  const int m = g.cells_per_axis;
  f.cell_mask.assign(g.cell_count(), 1);
  f.node_active.assign(g.node_count(), 0);
  const double hpow = std::pow(g.h, g.dim - 2);

  if (g.dim == 1) {
    f.wx = Arr::Zero(m);
    for (int c = 0; c < m; ++c) f.wx[c] = med.a11[c] * hpow;
    for (int i = 0; i < m; ++i) f.node_active[i] = 1;
    return f;
  }
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) f.node_active[g.node_index(ix, iy)] = 1;

  f.wx = Arr::Zero(m * m);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const double below = med.a11[g.cell_index(ix, (iy + m - 1) % m)];
      const double above = med.a11[g.cell_index(ix, iy)];
      f.wx[ix + m * iy] = harm2(below, above) * hpow;
    }
  f.wy = Arr::Zero(m * m);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const double left = med.a22[g.cell_index((ix + m - 1) % m, iy)];
      const double right = med.a22[g.cell_index(ix, iy)];
      f.wy[ix + m * iy] = harm2(left, right) * hpow;
    }
  if (med.has_mixed) {
    f.mixed = Arr::Zero(g.cell_count());
    const double hd = g.cell_volume();
    for (int c = 0; c < g.cell_count(); ++c) f.mixed[c] = 2.0 * med.a12[c] * hd;
  }
  return f;
}

DirichletForm DirichletForm::from_weights(const Grid& g, Arr wx, Arr wy,
                                          std::vector<char> cell_mask,
                                          std::vector<char> node_active) {
  DirichletForm f;
  f.grid = g;
  f.periodic = false;
  f.wx = std::move(wx);
  f.wy = std::move(wy);
  f.cell_mask = std::move(cell_mask);
  f.node_active = std::move(node_active);
  return f;
}

namespace {

// Visit every edge: cb(node_a, node_b, weight, direction).
template <typename F>
void for_each_edge(const DirichletForm& f, F&& cb) {
  const Grid& g = f.grid;
  const int m = g.cells_per_axis, n = g.nodes_per_axis;
  if (g.dim == 1) {
    if (f.periodic) {
      for (int ix = 0; ix < m; ++ix)
        if (f.wx[ix] != 0.0) cb(ix, (ix + 1) % m, f.wx[ix], 0);
    } else {
      for (int ix = 0; ix < m; ++ix)
        if (f.wx[ix] != 0.0) cb(ix, ix + 1, f.wx[ix], 0);
    }
    return;
  }
  if (f.periodic) {
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix) {
        const double w = f.wx[ix + m * iy];
        if (w != 0.0) cb(ix + n * iy, (ix + 1) % m + n * iy, w, 0);
      }
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix) {
        const double w = f.wy[ix + m * iy];
        if (w != 0.0) cb(ix + n * iy, ix + n * ((iy + 1) % m), w, 1);
      }
    return;
  }
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const double w = f.wx[ix + m * iy];
      if (w != 0.0) cb(ix + n * iy, ix + 1 + n * iy, w, 0);
    }
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double w = f.wy[ix + n * iy];
      if (w != 0.0) cb(ix + n * iy, ix + n * (iy + 1), w, 1);
    }
}

// Corner indices of cell c with periodic wrapping when needed.
inline void cell_corners(const DirichletForm& f, int c, int out[4]) {
  const Grid& g = f.grid;
  const int m = g.cells_per_axis, n = g.nodes_per_axis;
  const int cx = c % m, cy = c / m;
  const int xp = f.periodic ? (cx + 1) % m : cx + 1;
  const int yp = f.periodic ? (cy + 1) % m : cy + 1;
  out[0] = cx + n * cy;   // sw
  out[1] = xp + n * cy;   // se
  out[2] = cx + n * yp;   // nw
  out[3] = xp + n * yp;   // ne
}

}  // namespace

Vec DirichletForm::apply(const Vec& u) const {
  Vec out = Vec::Zero(u.size());
  for_each_edge(*this, [&](int a, int b, double w, int) {
    const double d = w * (u[b] - u[a]);
    out[b] += d;
    out[a] -= d;
  });
  if (mixed.size() > 0) {
    const double inv2h = 0.5 / grid.h;
    int cr[4];
    for (int c = 0; c < grid.cell_count(); ++c) {
      const double mcoef = mixed[c];
      if (mcoef == 0.0) continue;
      cell_corners(*this, c, cr);
      const double sw = u[cr[0]], se = u[cr[1]], nw = u[cr[2]], ne = u[cr[3]];
      const double gx = (se - sw + ne - nw) * inv2h;
      const double gy = (nw - sw + ne - se) * inv2h;
      const double s = mcoef * inv2h * 0.5;
      out[cr[0]] += s * (-gy - gx);
      out[cr[1]] += s * (gy - gx);
      out[cr[2]] += s * (gx - gy);
      out[cr[3]] += s * (gx + gy);
    }
  }
  return out;
}

double DirichletForm::energy(const Vec& u) const {
  double acc = 0.0;
  for_each_edge(*this, [&](int a, int b, double w, int) {
    const double d = u[b] - u[a];
    acc += w * d * d;
  });
  if (mixed.size() > 0) {
    const double inv2h = 0.5 / grid.h;
    int cr[4];
    for (int c = 0; c < grid.cell_count(); ++c) {
      const double mcoef = mixed[c];
      if (mcoef == 0.0) continue;
      cell_corners(*this, c, cr);
      const double gx = (u[cr[1]] - u[cr[0]] + u[cr[3]] - u[cr[2]]) * inv2h;
      const double gy = (u[cr[2]] - u[cr[0]] + u[cr[3]] - u[cr[1]]) * inv2h;
      acc += mcoef * gx * gy;
    }
  }
  return acc;
}

double DirichletForm::bilinear(const Vec& u, const Vec& v) const {
  double acc = 0.0;
  for_each_edge(*this, [&](int a, int b, double w, int) {
    acc += w * (u[b] - u[a]) * (v[b] - v[a]);
  });
  if (mixed.size() > 0) {
    const double inv2h = 0.5 / grid.h;
    int cr[4];
    for (int c = 0; c < grid.cell_count(); ++c) {
      const double mcoef = mixed[c];
      if (mcoef == 0.0) continue;
      cell_corners(*this, c, cr);
      const double gxu = (u[cr[1]] - u[cr[0]] + u[cr[3]] - u[cr[2]]) * inv2h;
      const double gyu = (u[cr[2]] - u[cr[0]] + u[cr[3]] - u[cr[1]]) * inv2h;
      const double gxv = (v[cr[1]] - v[cr[0]] + v[cr[3]] - v[cr[2]]) * inv2h;
      const double gyv = (v[cr[2]] - v[cr[0]] + v[cr[3]] - v[cr[1]]) * inv2h;
      acc += 0.5 * mcoef * (gxu * gyv + gxv * gyu);
    }
  }
  return acc;
}

Arr DirichletForm::diagonal() const {
  Arr d = Arr::Zero(grid.node_count());
  for_each_edge(*this, [&](int a, int b, double w, int) {
    d[a] += w;
    d[b] += w;
  });
  if (mixed.size() > 0) {
    const double inv4h2 = 0.25 / (grid.h * grid.h);
    int cr[4];
    for (int c = 0; c < grid.cell_count(); ++c) {
      const double mcoef = mixed[c];
      if (mcoef == 0.0) continue;
      cell_corners(*this, c, cr);
      d[cr[0]] += mcoef * inv4h2;
      d[cr[1]] -= mcoef * inv4h2;
      d[cr[2]] -= mcoef * inv4h2;
      d[cr[3]] += mcoef * inv4h2;
    }
  }
  return d;
}

Vec DirichletForm::plane_flux(const Vec2& q) const {
  Vec c = Vec::Zero(grid.node_count());
  const double h = grid.h;
  for_each_edge(*this, [&](int a, int b, double w, int dir) {
    const double s = w * q[dir] * h;
    c[b] += s;
    c[a] -= s;
  });
  if (mixed.size() > 0) {
    const double inv2h = 0.5 / grid.h;
    int cr[4];
    for (int cc = 0; cc < grid.cell_count(); ++cc) {
      const double mcoef = mixed[cc];
      if (mcoef == 0.0) continue;
      cell_corners(*this, cc, cr);
      // d/du of m*(q1 + gx)(q2 + gy), linear part
      const double s = mcoef * inv2h * 0.5;
      c[cr[0]] += s * (-q[1] - q[0]);
      c[cr[1]] += s * (q[1] - q[0]);
      c[cr[2]] += s * (q[0] - q[1]);
      c[cr[3]] += s * (q[0] + q[1]);
    }
  }
  return c;
}

double DirichletForm::corrected_bilinear(const Vec2& ei, const Vec& chi_i, const Vec2& ej,
                                         const Vec& chi_j) const {
  double acc = 0.0;
  const double h = grid.h;
  for_each_edge(*this, [&](int a, int b, double w, int dir) {
    acc += w * (ei[dir] * h + chi_i[b] - chi_i[a]) * (ej[dir] * h + chi_j[b] - chi_j[a]);
  });
  if (mixed.size() > 0) {
    const double inv2h = 0.5 / grid.h;
    int cr[4];
    for (int c = 0; c < grid.cell_count(); ++c) {
      const double mcoef = mixed[c];
      if (mcoef == 0.0) continue;
      cell_corners(*this, c, cr);
      const double gxi = ei[0] + (chi_i[cr[1]] - chi_i[cr[0]] + chi_i[cr[3]] - chi_i[cr[2]]) * inv2h;
      const double gyi = ei[1] + (chi_i[cr[2]] - chi_i[cr[0]] + chi_i[cr[3]] - chi_i[cr[1]]) * inv2h;
      const double gxj = ej[0] + (chi_j[cr[1]] - chi_j[cr[0]] + chi_j[cr[3]] - chi_j[cr[2]]) * inv2h;
      const double gyj = ej[1] + (chi_j[cr[2]] - chi_j[cr[0]] + chi_j[cr[3]] - chi_j[cr[1]]) * inv2h;
      acc += 0.5 * mcoef * (gxi * gyj + gxj * gyi);
    }
  }
  return acc;
}

double DirichletForm::plane_energy_density(const Vec2& q) const {
  double acc = 0.0;
  const double h2 = grid.h * grid.h;
  for_each_edge(*this, [&](int, int, double w, int dir) { acc += w * q[dir] * q[dir] * h2; });
  if (mixed.size() > 0) acc += (mixed * q[0] * q[1]).sum();
  double vol = 0.0;
  for (char m : cell_mask) vol += m ? grid.cell_volume() : 0.0;
  return acc / vol;
}

RegionNodes classify_region_nodes(const Grid& g, const std::vector<char>& cell_mask) {
  RegionNodes r;
  r.active.assign(g.node_count(), 0);
  r.interior.assign(g.node_count(), 0);
  const int m = g.cells_per_axis;
  if (g.dim == 1) {
    for (int c = 0; c < m; ++c)
      if (cell_mask[c]) r.active[c] = r.active[c + 1] = 1;
    for (int i = 0; i < g.node_count(); ++i) {
      if (!r.active[i]) continue;
      const bool left = i > 0 && cell_mask[i - 1];
      const bool right = i < m && cell_mask[i];
      if (left && right)
        r.interior[i] = 1;
      else
        r.boundary.push_back(i);
    }
    return r;
  }
  for (int c = 0; c < g.cell_count(); ++c) {
    if (!cell_mask[c]) continue;
    const int cx = c % m, cy = c / m;
    r.active[g.node_index(cx, cy)] = 1;
    r.active[g.node_index(cx + 1, cy)] = 1;
    r.active[g.node_index(cx, cy + 1)] = 1;
    r.active[g.node_index(cx + 1, cy + 1)] = 1;
  }
  const int n = g.nodes_per_axis;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int idx = g.node_index(ix, iy);
      if (!r.active[idx]) continue;
      bool inner = ix > 0 && ix < n - 1 && iy > 0 && iy < n - 1;
      if (inner) {
        for (int dy = -1; dy <= 0 && inner; ++dy)
          for (int dx = -1; dx <= 0 && inner; ++dx)
            if (!cell_mask[g.cell_index(ix + dx, iy + dy)]) inner = false;
      }
      if (inner)
        r.interior[idx] = 1;
      else
        r.boundary.push_back(idx);
    }
  return r;
}

}  // namespace fbh

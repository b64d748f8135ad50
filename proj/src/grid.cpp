#include "fbh/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fbh/io_util.hpp"

namespace fbh {

Grid::Grid(int dim_, double R_, double h_) : dim(dim_), R(R_), h(h_) {
  if (dim != 1 && dim != 2) throw ConfigInvalid("Grid: dim must be 1 or 2");
  const double ratio = R / h;
  const int m = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - m) > 1e-9 || m < 8)
    throw ConfigInvalid("Grid: R/h must be an integer >= 8");
  cells_per_axis = 2 * m;
  nodes_per_axis = cells_per_axis + 1;
}

bool Grid::is_box_boundary_node(int idx) const {
  const int ix = dim == 1 ? idx : idx % nodes_per_axis;
  const int iy = dim == 1 ? 0 : idx / nodes_per_axis;
  if (ix == 0 || ix == nodes_per_axis - 1) return true;
  return dim == 2 && (iy == 0 || iy == nodes_per_axis - 1);
}

GridFunction GridFunction::sample(const Grid& g,
                                  const std::function<double(double, double)>& f) {
  GridFunction u(g);
  for (int i = 0; i < g.node_count(); ++i) {
    auto p = g.node_pos(i);
    u.values[i] = f(p[0], p[1]);
  }
  return u;
}

std::vector<int> cells_in_ball(const Grid& g, const Ball& b) {
  std::vector<int> out;
  out.reserve(g.cell_count());
  for (int c = 0; c < g.cell_count(); ++c)
    if (b.contains(g.cell_center(c), g.dim)) out.push_back(c);
  if (out.empty()) throw EmptyBall("no cell center lies in the ball");
  return out;
}

std::vector<int> nodes_in_ball(const Grid& g, const Ball& b) {
  std::vector<int> out;
  for (int i = 0; i < g.node_count(); ++i)
    if (b.contains(g.node_pos(i), g.dim)) out.push_back(i);
  if (out.empty()) throw EmptyBall("no node lies in the ball");
  return out;
}

std::vector<int> all_cells(const Grid& g) {
  std::vector<int> out(g.cell_count());
  for (int c = 0; c < g.cell_count(); ++c) out[c] = c;
  return out;
}

Arr cell_values(const GridFunction& u) {
  const Grid& g = u.grid;
  Arr v(g.cell_count());
  if (g.dim == 1) {
    for (int i = 0; i < g.cells_per_axis; ++i)
      v[i] = 0.5 * (u.values[i] + u.values[i + 1]);
    return v;
  }
  const int n = g.nodes_per_axis;
  for (int cy = 0; cy < g.cells_per_axis; ++cy)
    for (int cx = 0; cx < g.cells_per_axis; ++cx) {
      const int a = cx + n * cy;
      v[g.cell_index(cx, cy)] =
          0.25 * (u.values[a] + u.values[a + 1] + u.values[a + n] + u.values[a + n + 1]);
    }
  return v;
}

Eigen::MatrixXd cell_gradient(const GridFunction& u) {
  const Grid& g = u.grid;
  Eigen::MatrixXd grad(g.cell_count(), g.dim);
  const double inv_h = 1.0 / g.h;
  if (g.dim == 1) {
    for (int i = 0; i < g.cells_per_axis; ++i)
      grad(i, 0) = (u.values[i + 1] - u.values[i]) * inv_h;
    return grad;
  }
  const int n = g.nodes_per_axis;
  for (int cy = 0; cy < g.cells_per_axis; ++cy)
    for (int cx = 0; cx < g.cells_per_axis; ++cx) {
      const int a = cx + n * cy;  // SW corner
      const double sw = u.values[a], se = u.values[a + 1];
      const double nw = u.values[a + n], ne = u.values[a + n + 1];
      const int c = g.cell_index(cx, cy);
      grad(c, 0) = 0.5 * ((se - sw) + (ne - nw)) * inv_h;
      grad(c, 1) = 0.5 * ((nw - sw) + (ne - se)) * inv_h;
    }
  return grad;
}

void write_gridfunction(const GridFunction& u, const std::string& path) {
  std::string buf;
  buf.reserve(32 + 8 * u.values.size());
  buf.append("FBH1", 4);
  io::put_u32(buf, static_cast<uint32_t>(u.grid.dim));
  io::put_u32(buf, static_cast<uint32_t>(u.grid.nodes_per_axis));
  io::put_f64(buf, u.grid.h);
  for (int k = 0; k < u.grid.dim; ++k) io::put_f64(buf, -u.grid.R);
  for (int i = 0; i < u.values.size(); ++i) io::put_f64(buf, u.values[i]);
  io::atomic_write(path, buf);
}

GridFunction read_gridfunction(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  size_t off = 0;
  if (data.size() < 4 || data.compare(0, 4, "FBH1") != 0)
    throw ConfigInvalid(path + ": bad magic, expected FBH1");
  off = 4;
  const uint32_t dim = io::get_u32(data, off);
  const uint32_t n = io::get_u32(data, off);
  const double h = io::get_f64(data, off);
  double origin0 = io::get_f64(data, off);
  if (dim == 2) io::get_f64(data, off);  // origin1, equal to origin0 for our boxes
  Grid g(static_cast<int>(dim), -origin0, h);
  if (g.nodes_per_axis != static_cast<int>(n))
    throw ConfigInvalid(path + ": inconsistent node count");
  GridFunction u(g);
  for (int i = 0; i < u.values.size(); ++i) u.values[i] = io::get_f64(data, off);
  return u;
}

void write_gridfunction_csv(const GridFunction& u, const std::string& path) {
  std::string buf = u.grid.dim == 1 ? "x,value\n" : "x,y,value\n";
  char line[128];
  for (int i = 0; i < u.grid.node_count(); ++i) {
    auto p = u.grid.node_pos(i);
    if (u.grid.dim == 1)
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", p[0], u.values[i]);
    else
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p[0], p[1], u.values[i]);
    buf += line;
  }
  io::atomic_write(path, buf);
}

}  // namespace fbh

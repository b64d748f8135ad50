#ifndef FBH_GRID_HPP
#define FBH_GRID_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbh/types.hpp"

namespace fbh {

/// Uniform node-centered grid over the closed box [-R, R]^dim, dim = 1 or 2.
/// Nodes sit at -R + i*h; cells are the h-boxes between adjacent nodes and are
/// identified by their centers.
struct Grid {
  int dim = 2;
  double R = 1.0;
  double h = 0.125;
  int nodes_per_axis = 0;  // 2R/h + 1
  int cells_per_axis = 0;  // 2R/h

  Grid() = default;
  Grid(int dim_, double R_, double h_);

  int node_count() const {
    return dim == 1 ? nodes_per_axis : nodes_per_axis * nodes_per_axis;
  }
  int cell_count() const {
    return dim == 1 ? cells_per_axis : cells_per_axis * cells_per_axis;
  }

  int node_index(int ix, int iy = 0) const { return ix + nodes_per_axis * iy; }
  int cell_index(int ix, int iy = 0) const { return ix + cells_per_axis * iy; }

  std::array<double, 2> node_pos(int idx) const {
    if (dim == 1) return {-R + h * idx, 0.0};
    const int ix = idx % nodes_per_axis, iy = idx / nodes_per_axis;
    return {-R + h * ix, -R + h * iy};
  }
  std::array<double, 2> cell_center(int idx) const {
    if (dim == 1) return {-R + h * (idx + 0.5), 0.0};
    const int ix = idx % cells_per_axis, iy = idx / cells_per_axis;
    return {-R + h * (ix + 0.5), -R + h * (iy + 0.5)};
  }

  double cell_volume() const { return dim == 1 ? h : h * h; }

  /// Nodes on the boundary of the box.
  bool is_box_boundary_node(int idx) const;

  bool same_layout(const Grid& o) const {
    return dim == o.dim && nodes_per_axis == o.nodes_per_axis && R == o.R && h == o.h;
  }
};

/// Scalar nodal field on a Grid.
struct GridFunction {
  Grid grid;
  Vec values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g) : grid(g), values(Vec::Zero(g.node_count())) {}
  GridFunction(const Grid& g, const Vec& v) : grid(g), values(v) {}

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }

  /// Sample a callable at every node.
  static GridFunction sample(const Grid& g, const std::function<double(double, double)>& f);
};

/// Ball used for all averaged norms and region restrictions; membership of a
/// cell is decided by its center, of a node by its position.
struct Ball {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.0;

  Ball() = default;
  Ball(double r) : radius(r) {}
  Ball(std::array<double, 2> c, double r) : center(c), radius(r) {}

  bool contains(const std::array<double, 2>& p, int dim) const {
    const double dx = p[0] - center[0];
    const double dy = dim == 1 ? 0.0 : p[1] - center[1];
    return dx * dx + dy * dy <= radius * radius;
  }
};

/// Indices of cells whose centers lie in the ball. Throws EmptyBall.
std::vector<int> cells_in_ball(const Grid& g, const Ball& b);
/// Indices of nodes inside the ball.
std::vector<int> nodes_in_ball(const Grid& g, const Ball& b);

/// All cells of the grid.
std::vector<int> all_cells(const Grid& g);

/// Value of a nodal function at a cell = average of its corner nodes.
Arr cell_values(const GridFunction& u);

/// Cell-centered first-order gradient. Column k holds the k-th component
/// (dim columns). In 2D each component averages the two parallel edge
/// differences of the cell, which is the bilinear gradient at the center.
Eigen::MatrixXd cell_gradient(const GridFunction& u);

/// Persistence: magic "FBH1", u32 dim, u32 nodes-per-axis, f64 h,
/// f64 origin per axis, then node values in row-major order.
void write_gridfunction(const GridFunction& u, const std::string& path);
GridFunction read_gridfunction(const std::string& path);

/// CSV export: one row per node, columns x[,y],value.
void write_gridfunction_csv(const GridFunction& u, const std::string& path);

}  // namespace fbh

#endif

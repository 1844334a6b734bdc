#pragma once

#include <cstddef>
#include <vector>

namespace nlac {

/// Node-centred uniform grid on [0, Lx] x [0, Ly]; nodes sit on the boundary.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double Lx = 1.0;
  double Ly = 1.0;

  double hx() const { return Lx / (nx - 1); }
  double hy() const { return Ly / (ny - 1); }
  double h() const;  // min(hx, hy)
  double x(int i) const { return i * hx(); }
  double y(int j) const { return j * hy(); }
  double area() const { return Lx * Ly; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  /// Throws ConfigInvalid unless nx, ny >= 16 and the extents are positive.
  void validate() const;
  /// Square grid over [0, L]^2 with spacing at most h.
  static Grid2D with_spacing(double h, double L = 1.0);
};

bool operator==(const Grid2D& a, const Grid2D& b);

struct Field2D {
  Grid2D grid;
  std::vector<double> values;  // row-major, index = j * nx + i
  double time = 0.0;

  Field2D() = default;
  explicit Field2D(const Grid2D& g, double fill = 0.0, double t = 0.0)
      : grid(g), values(g.size(), fill), time(t) {}

  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }
  double sup_norm() const;
  bool all_finite() const;
};

/// Integral over the rectangle by the 2D trapezoid rule; per-row partial sums
/// combined with a fixed pairwise tree.
double mass(const Field2D& field);
double max_abs_difference(const Field2D& a, const Field2D& b);

enum class InitialShape { Circle, Ellipse, Constant };

/// Smooth initial data u0 = tanh(q(x) / width), q a quadratic level function
/// whose zero set is the circle/ellipse and which behaves like the signed
/// distance near it. Coordinates are pre-composed with an even, C2 boundary
/// map so that du0/dnu = 0 on the walls.
struct InitialDataSpec {
  InitialShape shape = InitialShape::Circle;
  double cx = 0.5;
  double cy = 0.5;
  double r0 = 0.25;     // circle radius
  double semi_a = 0.3;  // ellipse semi-axes (x, y before rotation)
  double semi_b = 0.2;
  double angle = 0.0;
  double width = 0.05;
  double constant = 0.5;
  double cutoff = 0.1;  // width of the boundary band used by the Neumann map

  double operator()(double x, double y, double Lx, double Ly) const;
  /// Level function q (negative inside) without the boundary map.
  double level_function(double x, double y) const;
};

Field2D init_field(const InitialDataSpec& spec, const Grid2D& grid, double level = 0.0);

/// Sup norms of u0 and its first and second derivatives by centred differences
/// (ghost reflection at the walls); C0 is their sum, floored at 1.
struct DataBounds {
  double sup_u = 0.0;
  double sup_grad = 0.0;
  double sup_hessian = 0.0;
  double sup_laplacian = 0.0;
  double C0 = 1.0;
};
DataBounds measure_bounds(const Field2D& u0);

}  // namespace nlac

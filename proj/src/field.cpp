#include "nlac/field.hpp"

#include <algorithm>
#include <cmath>

#include "nlac/error.hpp"
#include "nlac/parallel.hpp"

namespace nlac {

double Grid2D::h() const { return std::min(hx(), hy()); }

void Grid2D::validate() const {
  if (nx < 16 || ny < 16) throw Error(ErrorKind::ConfigInvalid, "grid needs nx, ny >= 16");
  if (!(Lx > 0) || !(Ly > 0)) throw Error(ErrorKind::ConfigInvalid, "grid extents must be positive");
}

Grid2D Grid2D::with_spacing(double h, double L) {
  const int n = static_cast<int>(std::ceil(L / h - 1e-9)) + 1;
  return Grid2D{n, n, L, L};
}

bool operator==(const Grid2D& a, const Grid2D& b) {
  return a.nx == b.nx && a.ny == b.ny && a.Lx == b.Lx && a.Ly == b.Ly;
}

double Field2D::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

bool Field2D::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double mass(const Field2D& field) {
  const auto& g = field.grid;
  std::vector<double> rows(static_cast<std::size_t>(g.ny));
  for (int j = 0; j < g.ny; ++j) {
    const double* row = field.values.data() + g.index(0, j);
    double s = 0.5 * (row[0] + row[g.nx - 1]);
    for (int i = 1; i < g.nx - 1; ++i) s += row[i];
    const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
    rows[static_cast<std::size_t>(j)] = wy * s;
  }
  return pairwise_sum(rows) * g.hx() * g.hy();
}

double max_abs_difference(const Field2D& a, const Field2D& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    d = std::max(d, std::abs(a.values[k] - b.values[k]));
  return d;
}

namespace {

// Even C2 map of [-L, 2L] into [0, L]: identity in the interior, flat at both
// walls. On the band [0, c] it is c * (1/3 + t^2 - t^3/3), t = s / c.
double wall_map(double s, double L, double c) {
  if (c <= 0.0) return s;
  auto band = [c](double r) {
    const double t = r / c;
    return c * (1.0 / 3.0 + t * t - t * t * t / 3.0);
  };
  s = std::abs(s);
  if (s > L) s = 2 * L - s;
  if (s < c) return band(s);
  if (s > L - c) return L - band(L - s);
  return s;
}

}  // namespace

double InitialDataSpec::level_function(double x, double y) const {
  switch (shape) {
    case InitialShape::Circle: {
      const double dx = x - cx, dy = y - cy;
      return (dx * dx + dy * dy - r0 * r0) / (2.0 * r0);
    }
    case InitialShape::Ellipse: {
      const double c = std::cos(angle), s = std::sin(angle);
      const double dx = x - cx, dy = y - cy;
      const double xr = c * dx + s * dy, yr = -s * dx + c * dy;
      const double q = (xr * xr) / (semi_a * semi_a) + (yr * yr) / (semi_b * semi_b) - 1.0;
      return 0.5 * std::min(semi_a, semi_b) * q;
    }
    case InitialShape::Constant:
      return 0.0;
  }
  return 0.0;
}

double InitialDataSpec::operator()(double x, double y, double Lx, double Ly) const {
  if (shape == InitialShape::Constant) return constant;
  const double band = cutoff * std::min(Lx, Ly);
  return std::tanh(level_function(wall_map(x, Lx, band), wall_map(y, Ly, band)) / width);
}

Field2D init_field(const InitialDataSpec& spec, const Grid2D& grid, double level) {
  grid.validate();
  Field2D f(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) f.at(i, j) = spec(grid.x(i), grid.y(j), grid.Lx, grid.Ly);

  std::size_t below = 0, above = 0;
  bool wall_ok = true;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double v = f.at(i, j);
      if (v < level) ++below;
      if (v > level) ++above;
      const bool wall = i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1;
      if (wall && !(v > level)) wall_ok = false;
    }
  }
  if (below == 0 || above == 0)
    throw Error(ErrorKind::BadInterface, "initial data has no level curve at the threshold");
  if (!wall_ok) throw Error(ErrorKind::BadInterface, "initial level curve touches the boundary");
  return f;
}

DataBounds measure_bounds(const Field2D& u) {
  const auto& g = u.grid;
  const double hx = g.hx(), hy = g.hy();
  auto val = [&](int i, int j) {
    i = i < 0 ? -i : (i >= g.nx ? 2 * (g.nx - 1) - i : i);
    j = j < 0 ? -j : (j >= g.ny ? 2 * (g.ny - 1) - j : j);
    return u.at(i, j);
  };
  DataBounds b;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = val(i, j);
      const double ux = (val(i + 1, j) - val(i - 1, j)) / (2 * hx);
      const double uy = (val(i, j + 1) - val(i, j - 1)) / (2 * hy);
      const double uxx = (val(i + 1, j) - 2 * c + val(i - 1, j)) / (hx * hx);
      const double uyy = (val(i, j + 1) - 2 * c + val(i, j - 1)) / (hy * hy);
      const double uxy = (val(i + 1, j + 1) - val(i + 1, j - 1) - val(i - 1, j + 1) +
                          val(i - 1, j - 1)) /
                         (4 * hx * hy);
      b.sup_u = std::max(b.sup_u, std::abs(c));
      b.sup_grad = std::max(b.sup_grad, std::hypot(ux, uy));
      b.sup_hessian = std::max({b.sup_hessian, std::abs(uxx), std::abs(uyy), std::abs(uxy)});
      b.sup_laplacian = std::max(b.sup_laplacian, std::abs(uxx + uyy));
    }
  }
  b.C0 = std::max(1.0, b.sup_u + b.sup_grad + b.sup_hessian);
  return b;
}

}  // namespace nlac

#include "nlac/field_solver.hpp"

#include <algorithm>
#include <cmath>

#include "nlac/error.hpp"
#include "nlac/parallel.hpp"

namespace nlac {

SolverConfig SolverConfig::for_model(const BistableModel& model, double epsilon) {
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  cfg.reaction = model.nl;
  cfg.F1 = model.F1;
  return cfg;
}

double SolverConfig::default_dt(const Grid2D& grid, double epsilon, double F1) {
  const double h = grid.h();
  const double reaction = F1 > 0 ? epsilon * epsilon / F1 : h * h / 4;
  return 0.2 * std::min(h * h / 4, reaction);
}

double SolverConfig::time_step(const Grid2D& grid) const {
  return dt > 0 ? dt : default_dt(grid, epsilon, F1);
}

void SolverConfig::validate(const Grid2D& grid) const {
  grid.validate();
  if (!(epsilon > 0)) throw Error(ErrorKind::ConfigInvalid, "epsilon must be positive");
  if (!(t_end >= 0)) throw Error(ErrorKind::ConfigInvalid, "tEnd must be non-negative");
  const double step = time_step(grid);
  if (!(step > 0)) throw Error(ErrorKind::ConfigInvalid, "dt must be positive");
  if (grid.h() > epsilon / 4 * (1 + 1e-9))
    throw Error(ErrorKind::ConfigInvalid, "grid does not resolve the layer: h > eps/4");
  const double reaction_limit = F1 > 0 ? epsilon * epsilon / F1 : 1e300;
  if (scheme == Scheme::Explicit) {
    const double diffusion_limit =
        1.0 / (2.0 / (grid.hx() * grid.hx()) + 2.0 / (grid.hy() * grid.hy()));
    if (step > diffusion_limit * (1 + 1e-12))
      throw Error(ErrorKind::ConfigInvalid, "explicit dt above the diffusion limit");
  }
  if (step > reaction_limit * (1 + 1e-12))
    throw Error(ErrorKind::ConfigInvalid, "dt above the reaction limit eps^2 / F1");
}

void apply_laplacian(const Field2D& u, std::vector<double>& out, int workers) {
  const auto& g = u.grid;
  const int nx = g.nx, ny = g.ny;
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  out.resize(g.size());
  const double* v = u.values.data();
  parallel_rows(static_cast<std::size_t>(ny), workers, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const int jm = j == 0 ? 1 : j - 1;
    const int jp = j == ny - 1 ? ny - 2 : j + 1;
    const double* row = v + static_cast<std::size_t>(j) * nx;
    const double* rm = v + static_cast<std::size_t>(jm) * nx;
    const double* rp = v + static_cast<std::size_t>(jp) * nx;
    double* o = out.data() + static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const int im = i == 0 ? 1 : i - 1;
      const int ip = i == nx - 1 ? nx - 2 : i + 1;
      o[i] = (row[im] - 2 * row[i] + row[ip]) * ihx2 + (rm[i] - 2 * row[i] + rp[i]) * ihy2;
    }
  });
}

namespace {

// <x, y> with trapezoid weights, in which the reflected Laplacian is symmetric.
double weighted_dot(const Grid2D& g, const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> rows(static_cast<std::size_t>(g.ny));
  for (int j = 0; j < g.ny; ++j) {
    const std::size_t o = g.index(0, j);
    double s = 0.5 * (x[o] * y[o] + x[o + g.nx - 1] * y[o + g.nx - 1]);
    for (int i = 1; i < g.nx - 1; ++i) s += x[o + i] * y[o + i];
    rows[static_cast<std::size_t>(j)] = ((j == 0 || j == g.ny - 1) ? 0.5 : 1.0) * s;
  }
  return pairwise_sum(rows);
}

// (I - theta Lap) x = b by conjugate gradients in the weighted inner product.
void solve_implicit(const Grid2D& g, double theta, const std::vector<double>& b,
                    std::vector<double>& x, double tol, int workers) {
  std::vector<double> r(b.size()), p, Ap(b.size()), lap;
  Field2D tmp(g);
  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    tmp.values = in;
    apply_laplacian(tmp, lap, workers);
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] - theta * lap[k];
  };
  apply(x, Ap);
  for (std::size_t k = 0; k < b.size(); ++k) r[k] = b[k] - Ap[k];
  p = r;
  const double bnorm = std::sqrt(weighted_dot(g, b, b));
  double rr = weighted_dot(g, r, r);
  const double target = tol * std::max(bnorm, 1e-300);
  for (int it = 0; it < 10000; ++it) {
    if (std::sqrt(rr) <= target) return;
    apply(p, Ap);
    const double alpha = rr / weighted_dot(g, p, Ap);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    const double rr_new = weighted_dot(g, r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
  }
  if (std::sqrt(rr) > target)
    throw Error(ErrorKind::LinearSolveFailed, "conjugate gradients did not converge");
}

}  // namespace

Field2D step(const Field2D& field, const SolverConfig& cfg, double dt) {
  const auto& g = field.grid;
  const double eps = cfg.epsilon;
  const double v = eps * mass(field);
  const double inv_eps2 = 1.0 / (eps * eps);
  const auto& f = cfg.reaction.f;

  std::vector<double> lap;
  apply_laplacian(field, lap, cfg.workers);

  Field2D next(g, 0.0, field.time + dt);
  const double* u = field.values.data();
  if (cfg.scheme == Scheme::Explicit) {
    parallel_rows(static_cast<std::size_t>(g.ny), cfg.workers, [&](std::size_t j) {
      const std::size_t o = j * static_cast<std::size_t>(g.nx);
      for (std::size_t k = o; k < o + static_cast<std::size_t>(g.nx); ++k)
        next.values[k] = u[k] + dt * (lap[k] + inv_eps2 * f(u[k], v));
    });
  } else {
    // Crank-Nicolson diffusion, explicit reaction.
    std::vector<double> rhs(g.size());
    parallel_rows(static_cast<std::size_t>(g.ny), cfg.workers, [&](std::size_t j) {
      const std::size_t o = j * static_cast<std::size_t>(g.nx);
      for (std::size_t k = o; k < o + static_cast<std::size_t>(g.nx); ++k)
        rhs[k] = u[k] + 0.5 * dt * lap[k] + dt * inv_eps2 * f(u[k], v);
    });
    next.values = field.values;
    solve_implicit(g, 0.5 * dt, rhs, next.values, cfg.cg_tolerance, cfg.workers);
  }
  for (double x : next.values)
    if (!(std::abs(x) <= cfg.divergence_limit))
      throw Error(ErrorKind::Diverged, "sup norm exceeded the divergence limit");
  return next;
}

Field2D step(const Field2D& field, const SolverConfig& cfg) {
  return step(field, cfg, cfg.time_step(field.grid));
}

Trajectory run(const Field2D& initial, const SolverConfig& cfg, const StepObserver& observer) {
  cfg.validate(initial.grid);
  Trajectory traj;
  const double dt = cfg.time_step(initial.grid);
  const double t0 = initial.time;
  const long n = cfg.t_end > 0 ? static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9)) : 0;

  Field2D u = initial;
  traj.snapshots.push_back(u);
  double m = mass(u);
  traj.mass_series.emplace_back(u.time, m);
  if (observer && !observer(u, m)) return traj;

  for (long k = 1; k <= n; ++k) {
    const double t_next = k == n ? t0 + cfg.t_end : t0 + k * dt;
    Field2D next = step(u, cfg, t_next - u.time);
    next.time = t_next;
    u = std::move(next);
    m = mass(u);
    traj.mass_series.emplace_back(u.time, m);
    const bool keep_going = !observer || observer(u, m);
    const bool snap = k == n || !keep_going || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0);
    if (snap) traj.snapshots.push_back(u);
    if (!keep_going) break;
  }
  return traj;
}

}  // namespace nlac

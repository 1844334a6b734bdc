#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nlac/field.hpp"
#include "nlac/profile.hpp"

namespace nlac {

enum class Scheme { Explicit, Imex };

/// Integration of u_t = Lap u + eps^-2 f(u, eps * int u) with homogeneous
/// Neumann walls. The nonlocal argument is frozen at the start of each step.
struct SolverConfig {
  double epsilon = 0.04;
  double dt = 0.0;  // 0 selects default_dt
  Scheme scheme = Scheme::Explicit;
  double t_end = 0.0;
  int snapshot_every = 0;  // 0: only first and last
  Nonlinearity reaction = Nonlinearity::cubic();
  double F1 = 2.0;  // sup |f_u(., 0)| on [-1, 1], sets the reaction time step limit
  int workers = 1;
  double divergence_limit = 10.0;
  double cg_tolerance = 1e-10;

  static SolverConfig for_model(const BistableModel& model, double epsilon);
  /// 0.2 * min(h^2 / 4, eps^2 / F1).
  static double default_dt(const Grid2D& grid, double epsilon, double F1);
  double time_step(const Grid2D& grid) const;
  /// Stability and layer-resolution checks; throws ConfigInvalid.
  void validate(const Grid2D& grid) const;
};

/// One step of the configured scheme. Throws Diverged or LinearSolveFailed.
Field2D step(const Field2D& field, const SolverConfig& cfg, double dt);
Field2D step(const Field2D& field, const SolverConfig& cfg);

/// Five-point Laplacian with ghost-cell reflection, written into `out`.
void apply_laplacian(const Field2D& u, std::vector<double>& out, int workers);

struct Trajectory {
  std::vector<Field2D> snapshots;
  std::vector<std::pair<double, double>> mass_series;  // (t, int u)
};

/// Sees the initial field and every stepped field with its mass; returning
/// false stops the run after recording the current state.
using StepObserver = std::function<bool(const Field2D&, double)>;

Trajectory run(const Field2D& initial, const SolverConfig& cfg, const StepObserver& observer = {});

}  // namespace nlac

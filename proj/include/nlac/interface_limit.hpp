#pragma once

#include <functional>
#include <vector>

#include "nlac/field.hpp"
#include "nlac/geometry.hpp"

namespace nlac {

// Limit interface law: V_n = -kappa + c0 (|Omega+| - |Omega-|), with Omega-
// the enclosed region and V_n its outward normal velocity.

struct LevelSetState {
  Grid2D grid;
  std::vector<double> phi;  // negative inside Omega-
  double time = 0.0;
  double c0 = 0.0;
  double domain_area = 1.0;

  Field2D as_field() const;
};

LevelSetState levelset_from_contour(const Contour& c, const Grid2D& grid, double c0,
                                    double domain_area, int workers = 1);

/// |Omega+| - |Omega-| from a smoothed Heaviside of phi (half-width 1.5 h).
double levelset_gamma(const LevelSetState& s);

/// Largest stable step for the curvature term, 0.2 h^2 / 4.
double levelset_default_dt(const Grid2D& grid);

/// One explicit step of phi_t = |grad phi| div(grad phi / |grad phi|) - c0 gamma |grad phi|:
/// central differences for the curvature part, Godunov upwinding for the
/// forcing. Throws InterfaceVanished when either phase shrinks to fewer than
/// five nodes.
LevelSetState levelset_step(const LevelSetState& s, double dt, int workers = 1);

/// Rebuild phi as the signed distance to its zero contour (cubic edge
/// crossings, circular-arc refinement), exact within 5 h of the contour and
/// clamped beyond.
LevelSetState reinitialize(const LevelSetState& s, int workers = 1);

Contour levelset_contour(const LevelSetState& s);

struct LevelSetOptions {
  double dt = 0.0;  // 0 selects levelset_default_dt
  int reinit_every = 20;
  int workers = 1;
};

/// Advance to t_end; the observer sees every state and may stop the run.
LevelSetState levelset_evolve(const LevelSetState& initial, double t_end,
                              const LevelSetOptions& opts = {},
                              const std::function<bool(const LevelSetState&)>& observer = {});

// Radial reference: R' = -1/R + c0 (A - 2 pi R^2), integrated in S = R^2.

struct RadialSeries {
  std::vector<double> t;
  std::vector<double> R;
  std::vector<double> gamma;
  double c0 = 0.0;
  double domain_area = 1.0;
  bool extinct = false;
  double extinction_time = 0.0;

  /// Radius at time t by cubic Hermite interpolation in S; 0 after extinction.
  double radius_at(double time) const;
};

double radial_velocity(double R, double c0, double domain_area);

/// Samples every `dt_out` (plus t_end). Stops early and sets `extinct` when the
/// circle collapses; throws BadInterface when R exceeds `R_max` (default: the
/// radius of a disc of area A).
RadialSeries radial_evolve(double R0, double c0, double domain_area, double t_end, double dt_out,
                           double R_max = 0.0);

struct SteadyState {
  double R = 0.0;
  bool stable = false;
};

/// Zeros of radial_velocity on (0, sqrt(A / pi)) by a sign scan refined with
/// bisection; stable when the velocity decreases through the zero.
std::vector<SteadyState> radial_steady_states(double c0, double domain_area);

}  // namespace nlac

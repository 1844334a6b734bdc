#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlac/field.hpp"
#include "nlac/field_solver.hpp"
#include "nlac/geometry.hpp"
#include "nlac/interface_limit.hpp"
#include "nlac/profile.hpp"
#include "nlac/report.hpp"

namespace nlac {

// ---------------------------------------------------------------------------
// Study setup

/// Everything an ε-sweep needs besides ε itself. The worker count is not part
/// of the canonical form, so reports do not depend on it.
struct StudySpec {
  std::vector<double> coefficients{0.0, 1.0, 0.0, -1.0};  // f(u, 0) = sum c_k u^k
  double coupling = -1.0;                                  // coefficient of v
  double Lx = 1.0;
  double Ly = 1.0;
  InitialDataSpec data = default_data();
  double h_ratio = 0.25;  // grid spacing h <= h_ratio * eps
  Scheme scheme = Scheme::Explicit;
  double M0 = 10.0;       // band half-width of u0 around a, in units of eps
  int workers = 1;

  static InitialDataSpec default_data();
  Nonlinearity nonlinearity() const;
  Profile1D profile() const;
  Grid2D grid_for(double epsilon) const;
  nlohmann::json canonical() const;
};

/// t^eps = mu^-1 eps^2 |ln eps|.
double generation_time(const BistableModel& model, double epsilon);

/// min |grad u0| over {u0 = a}, sampled along the level set of a fine grid.
double interface_gradient_floor(const InitialDataSpec& data, double Lx, double Ly, double a);

/// M1 = M0 / min_{Gamma0} |grad u0|: beyond distance M1 eps from Gamma0 the
/// linearised data clear the band |u0 - a| < M0 eps.
double band_constant_M1(const InitialDataSpec& data, double Lx, double Ly, double a, double M0);

/// Exact signed distance to {u0 = a} (negative where u0 < a).
std::vector<double> initial_distance(const Field2D& u0, double a, int workers = 1);

// ---------------------------------------------------------------------------
// Motion constants

struct MotionConstants {
  double beta = 0.0;
  double sigma = 0.0;
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double K = 0.0;
  double L = 0.0;
  double eps0 = 0.0;
  double d0 = 0.0;
  double M = 0.0;  // sup |V|
  double eta = 0.0;
  double M1 = 0.0;
  double T = 0.0;

  nlohmann::json to_json() const;
};

/// Requires 0 < eta < eta0 and a profile with corrector. K is the smallest
/// value above 1 meeting the U0 tail conditions (NoAdmissibleK when the table
/// cannot reach 1 - sigma beta / 3); eps0 is reduced until every smallness
/// condition on it holds, and L = ln(d0 / (4 eps0)) / T.
MotionConstants compute_motion_constants(const BistableModel& model, const ProfileTable& profile,
                                         double T, double eta, double M1, double d0);

double motion_p(const MotionConstants& k, double epsilon, double t);
double motion_dp(const MotionConstants& k, double epsilon, double t);
double motion_q(const MotionConstants& k, double epsilon, double t);

// ---------------------------------------------------------------------------
// Sub/super pairs

struct PairValue {
  double lower = 0.0;
  double upper = 0.0;
};

/// w^-(x, t), w^+(x, t) at a point where u0(x) = `u0`. Needs
/// t <= t^eps (ConfigInvalid otherwise) and eps G < delta0.
PairValue generation_pair_at(const BistableModel& model, double u0, double epsilon, double Cstar,
                             double t);
std::pair<Field2D, Field2D> build_generation_pair(const BistableModel& model, const Field2D& u0,
                                                  double epsilon, double Cstar, double t,
                                                  int workers = 1);

/// u^-(x, t), u^+(x, t) from the cut-off distance d to Gamma_t and gamma(t).
PairValue motion_pair_at(const ProfileTable& profile, const MotionConstants& k, double d,
                         double gamma, double epsilon, double t);
std::pair<Field2D, Field2D> build_motion_pair(const ProfileTable& profile, const MotionConstants& k,
                                              const SignedDistanceField& dist, double gamma,
                                              double epsilon, double t);

/// Pointwise access to a pair, as needed for residuals.
struct PairEvaluator {
  std::function<PairValue(double x, double y, double t)> eval;
  /// Sample filter for residual checks; empty accepts every point.
  std::function<bool(double x, double y, double t)> in_band;
  /// Limit value gamma(t) of the mass, when the pair follows a known interface.
  std::function<double(double t)> limit_mass;
  double t_begin = 0.0;
  double t_end = 0.0;
};

PairEvaluator generation_pair_evaluator(const BistableModel& model, const InitialDataSpec& data,
                                        double Lx, double Ly, double epsilon, double Cstar);

/// Motion pair around the circle of radius series.radius_at(t) centred at
/// (cx, cy), with gamma(t) = A - 2 pi R^2; residual samples restricted to the
/// tube |d| < d0.
PairEvaluator radial_motion_pair_evaluator(const ProfileTable& profile, const MotionConstants& k,
                                           const RadialSeries& series, double cx, double cy,
                                           double epsilon);

/// Negative control: lower and upper exchanged.
PairEvaluator swapped(const PairEvaluator& pair);

/// Constant of the flow estimate |Y_xixi / Y_xi| <= C (e^{mu(delta) tau} - 1)
/// on a tau x xi x delta lattice.
struct FlowScan {
  int points = 0;
  double min_Y_xi = 0.0;
  double max_abs_Y = 0.0;
  double bound_Y = 0.0;             // 2 C0
  double C = 0.0;                   // fitted on the interior delta slices
  double boundary_violation = 0.0;  // fraction of boundary-slice points above C
  double tau_max = 0.0;
};
FlowScan scan_flow(const BistableModel& model, double tau_max, int n_tau = 20, int n_xi = 20,
                   int n_delta = 5);

/// Smallest C* for which the generation residual bound is nonnegative,
/// times a safety factor.
double fit_cstar(const BistableModel& model, const DataBounds& bounds, double flow_C, double epsilon,
                 double safety = 1.25);

// ---------------------------------------------------------------------------
// Verification

enum class PairMode { Generation, Motion };

struct VerifyOptions {
  int samples_per_axis = 16;    // residual lattice in space (interior points)
  double fd_space = 0.0;        // 0 selects eps / 32
  double fd_time = 0.0;         // 0 selects eps^2 / 1000
  double C_num = 1.0;           // tol_residual = C_num (h^2 + dt) / eps^2
  double grid_dt = 0.0;         // dt of the run being compared (enters the tolerance)
  double time_offset = 0.0;     // PDE time = pair time + offset
  double sandwich_tol = 1e-12;  // absolute slack for the sandwich comparison
  /// Evaluate the nonlocal argument at the pair's limit mass instead of over
  /// [int u-, int u+]. A diagnostic: it isolates the local part of the residual.
  bool use_limit_mass = false;
  int workers = 1;
};

struct VerificationReport {
  PairMode mode = PairMode::Generation;
  double epsilon = 0.0;
  double tol_residual = 0.0;
  int residual_samples = 0;
  double residual_ok_fraction = 0.0;
  double worst_residual = 0.0;     // largest sign violation (0 when none)
  double ordering_fraction = 0.0;  // nodes with lower <= upper
  bool ordering_holds = false;     // pointwise ordering at every node and time
  bool mass_ordering_holds = false;
  bool initial_holds = false;      // lower <= u <= upper at the first compared time
  std::string route;               // "ordering", "relaxed" or "none"
  bool limit_mass_used = false;
  int sandwich_nodes = 0;
  double sandwich_fraction = 0.0;
  double sandwich_worst = 0.0;
  bool sandwich_checked = false;

  nlohmann::json to_json() const;
};

/// Residual signs on an interior lattice at `sample_times`, ordering and
/// integral ordering on `grid` at the same times, and, when `trajectory` is
/// given, the sandwich lower <= u <= upper at each stored snapshot whose
/// pair time lies in the pair's range.
VerificationReport verify_pair(const PairEvaluator& pair, const Nonlinearity& nl, double epsilon,
                               const Grid2D& grid, const std::vector<double>& sample_times,
                               PairMode mode, const VerifyOptions& opts = {},
                               const std::vector<Field2D>* trajectory = nullptr);

// ---------------------------------------------------------------------------
// Studies

/// Motion horizon: 60% of the extinction time of the radial law from the
/// initial circle. Throws ConfigInvalid for non-circular data or when the
/// circle does not go extinct within 10 time units.
double default_motion_horizon(const StudySpec& spec, const ProfileTable& profile);

/// First time t*(eps) at which u is within eta of +1 on {d0 >= M1 eps} and of
/// -1 on {d0 <= -M1 eps}, fitted against t^eps. Throws NeverGenerated when
/// t* exceeds 10 t^eps.
ExperimentReport generation_study(const StudySpec& spec, const std::vector<double>& eps_list,
                                  double eta);

/// Transition width at time t^eps + t_probe, fitted against eps.
ExperimentReport thickness_study(const StudySpec& spec, const std::vector<double>& eps_list,
                                 double eta, double t_probe);

/// Same estimator on the synthetic field U0(d/eps) around the initial circle.
ExperimentReport synthetic_thickness_study(const StudySpec& spec, const std::vector<double>& eps_list,
                                           double eta);

/// Hausdorff distance between {u = a} at t^eps + t and the reference interface
/// (radial law for circles, level set for ellipses), fitted against eps at each
/// probe time.
ExperimentReport motion_study(const StudySpec& spec, const std::vector<double>& eps_list,
                              const std::vector<double>& times);

struct StepBoundsReport {
  int checked = 0;
  int violations = 0;
  int exempt = 0;
  double violation_fraction = 0.0;
  bool inconclusive = false;
  std::string reason;

  nlohmann::json to_json() const;
};

/// H^- <= u <= H^+ at t^eps with the sigma beta / 2 margins; nodes within h of
/// the lines |d0| = M1 eps are exempt. Inconclusive when either side
/// {d0 >= M1 eps}, {d0 <= -M1 eps} holds no node or when M1 eps exceeds d0.
StepBoundsReport step_bounds_check(const Field2D& u, const std::vector<double>& d0_field,
                                   double epsilon, const MotionConstants& k);

}  // namespace nlac

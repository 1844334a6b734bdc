#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlac {

/// Reaction term f(u, v) with its first and second partial derivatives.
struct Nonlinearity {
  using Fn = std::function<double(double, double)>;
  Fn f;
  Fn f_u;
  Fn f_v;
  Fn f_uu;
  Fn f_uv;
  Fn f_vv;

  /// f(u, v) = sum_k coeffs[k] u^k + coupling * v, all derivatives analytic.
  static Nonlinearity polynomial(std::vector<double> coeffs, double coupling);

  /// Derivatives by central differences of `f`.
  static Nonlinearity from_function(Fn f, double step = 1e-5);

  /// The default double-well model u - u^3 + coupling * v.
  static Nonlinearity cubic(double coupling = -1.0) { return polynomial({0, 1, 0, -1}, coupling); }

  double slice(double u) const { return f(u, 0.0); }
  double slice_du(double u) const { return f_u(u, 0.0); }
  double slice_du2(double u) const { return f_uu(u, 0.0); }
};

struct AnalyzeOptions {
  double zero_tol = 1e-6;      // |outer zero -/+ 1| accepted as the wells
  double balance_tol = 1e-8;   // |int_{-1}^{1} f(u,0) du|
  double c0_bound = 1.0;       // initial-data amplitude bound entering G
  double domain_area = 1.0;
};

/// Bistable reaction term together with the constants read off from it.
struct BistableModel {
  Nonlinearity nl;
  double u_minus = -1.0;
  double a = 0.0;
  double u_plus = 1.0;
  double mu = 0.0;      // f~'(a)
  double m = 0.0;       // outer decay floor
  double b = 0.0;       // outer band width
  double a1 = 0.0;      // min U0' on the interior band; set by complete_with_profile
  double F1 = 0.0;      // sup |f~'| on [-1, 1]
  double H = 0.0;       // max |Hess f| on [-3,3]x[-1,1]
  double G = 0.0;       // 2 C0 |Omega| max |f_v|
  double C0 = 1.0;
  double domain_area = 1.0;
  double delta0 = 0.0;  // perturbation range keeping three zeros (halved dyadic scan)

  double eta0() const;
  /// 2(W(u) - W(-1)) evaluated from the nearer well.
  double potential_gap(double u) const;
};

BistableModel analyze_nonlinearity(const Nonlinearity& nl, const AnalyzeOptions& opts = {});

struct PerturbedZeros {
  double alpha_minus;
  double a_delta;
  double alpha_plus;
  double mu_delta;
};

PerturbedZeros perturbed_zeros(const BistableModel& model, double delta);

/// Y(tau, xi; delta) of Y' = f~(Y) + delta, Y(0) = xi, with the first two
/// xi-derivatives carried by the variational equations.
struct FlowValue {
  double Y;
  double Y_xi;
  double Y_xixi_over_Y_xi;
};

FlowValue ode_flow(const BistableModel& model, double tau, double xi, double delta);

struct ProfileTable {
  double z_max = 0.0;
  double dz = 0.0;
  std::vector<double> z;
  std::vector<double> U0, dU0, d2U0;
  std::vector<double> V, dV, d2V;
  double c0 = 0.0;
  double lambda = 0.0;         // min of the two fitted tail rates
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double tail_plus = 0.0;      // C in 1 - U0 ~ C exp(-lambda_plus z)
  double tail_minus = 0.0;     // C in U0 + 1 ~ C exp(lambda_minus z)
  double M_bound = 0.0;        // sup |V|
  double dV_decay = 0.0;       // C in |V'| + |V''| <= C exp(-lambda |z|)
  double V_plus_inf = 0.0;     // bounded-solution asymptotes of V
  double V_minus_inf = 0.0;
  double fredholm_residual = 0.0;

  std::size_t size() const { return z.size(); }
  bool has_corrector() const { return !V.empty(); }

  // Table evaluation with exponential tails beyond [-z_max, z_max].
  double eval_U0(double s) const;
  double eval_dU0(double s) const;
  double eval_d2U0(double s) const;
  double eval_V(double s) const;
  double eval_dV(double s) const;
  double eval_d2V(double s) const;
  /// Smallest z with U0(z) >= level (monotone inverse).
  double inverse_U0(double level) const;
};

/// Default half-width 16 / lambda_est, where lambda_est comes from linearizing at the wells.
double default_profile_extent(const BistableModel& model);

ProfileTable standing_wave(const BistableModel& model, double z_max = 0.0, int n = 4001);

struct CorrectorBounds {
  double M_bound;
  double dV_decay;
  double fredholm_residual;
  double solve_residual;
};

/// Fills c0 and V into `profile` and returns the recorded bounds.
CorrectorBounds corrector(const BistableModel& model, ProfileTable& profile);

double intrinsic_c0(const BistableModel& model);

/// Sets a1 from the profile (min U0' where U0 lies in [-1+b, 1-b]).
void complete_with_profile(BistableModel& model, const ProfileTable& profile);

/// Convenience: analyze + wave + corrector + a1.
struct Profile1D {
  BistableModel model;
  ProfileTable table;
};
Profile1D build_profile(const Nonlinearity& nl, const AnalyzeOptions& opts = {});

void write_profile_csv(std::ostream& out, const ProfileTable& table);

}  // namespace nlac

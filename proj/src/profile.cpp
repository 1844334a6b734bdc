#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "nlac/error.hpp"
#include "nlac/numerics.hpp"
#include "nlac/profile.hpp"

namespace nlac {

namespace {

struct Bracket {
  std::size_t i;
  double t;  // in [0, 1]
};

Bracket locate(const ProfileTable& p, double s) {
  const double x = (s + p.z_max) / p.dz;
  const auto last = static_cast<double>(p.size() - 2);
  const double xi = std::clamp(std::floor(x), 0.0, last);
  return {static_cast<std::size_t>(xi), x - xi};
}

// Cubic Hermite on one cell from values and slopes.
double hermite(double y0, double y1, double d0, double d1, double t, double h) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

double linear(const std::vector<double>& y, Bracket b) {
  return (1 - b.t) * y[b.i] + b.t * y[b.i + 1];
}

}  // namespace

double ProfileTable::eval_U0(double s) const {
  if (s > z_max) return 1.0 - tail_plus * std::exp(-lambda_plus * s);
  if (s < -z_max) return -1.0 + tail_minus * std::exp(lambda_minus * s);
  const auto b = locate(*this, s);
  return hermite(U0[b.i], U0[b.i + 1], dU0[b.i], dU0[b.i + 1], b.t, dz);
}

double ProfileTable::eval_dU0(double s) const {
  if (s > z_max) return lambda_plus * tail_plus * std::exp(-lambda_plus * s);
  if (s < -z_max) return lambda_minus * tail_minus * std::exp(lambda_minus * s);
  const auto b = locate(*this, s);
  return hermite(dU0[b.i], dU0[b.i + 1], d2U0[b.i], d2U0[b.i + 1], b.t, dz);
}

double ProfileTable::eval_d2U0(double s) const {
  if (s > z_max) return -lambda_plus * lambda_plus * tail_plus * std::exp(-lambda_plus * s);
  if (s < -z_max) return lambda_minus * lambda_minus * tail_minus * std::exp(lambda_minus * s);
  return linear(d2U0, locate(*this, s));
}

double ProfileTable::eval_V(double s) const {
  if (V.empty()) return 0.0;
  if (s > z_max) return V_plus_inf + (V.back() - V_plus_inf) * std::exp(-lambda_plus * (s - z_max));
  if (s < -z_max)
    return V_minus_inf + (V.front() - V_minus_inf) * std::exp(lambda_minus * (s + z_max));
  const auto b = locate(*this, s);
  return hermite(V[b.i], V[b.i + 1], dV[b.i], dV[b.i + 1], b.t, dz);
}

double ProfileTable::eval_dV(double s) const {
  if (V.empty()) return 0.0;
  if (s > z_max)
    return -lambda_plus * (V.back() - V_plus_inf) * std::exp(-lambda_plus * (s - z_max));
  if (s < -z_max)
    return lambda_minus * (V.front() - V_minus_inf) * std::exp(lambda_minus * (s + z_max));
  const auto b = locate(*this, s);
  return hermite(dV[b.i], dV[b.i + 1], d2V[b.i], d2V[b.i + 1], b.t, dz);
}

double ProfileTable::eval_d2V(double s) const {
  if (V.empty()) return 0.0;
  if (s > z_max)
    return lambda_plus * lambda_plus * (V.back() - V_plus_inf) *
           std::exp(-lambda_plus * (s - z_max));
  if (s < -z_max)
    return lambda_minus * lambda_minus * (V.front() - V_minus_inf) *
           std::exp(lambda_minus * (s + z_max));
  return linear(d2V, locate(*this, s));
}

double ProfileTable::inverse_U0(double level) const {
  if (level >= U0.back()) {
    if (level >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::log((1.0 - level) / tail_plus) / lambda_plus;
  }
  if (level <= U0.front()) {
    if (level <= -1.0) return -std::numeric_limits<double>::infinity();
    return std::log((level + 1.0) / tail_minus) / lambda_minus;
  }
  const auto it = std::lower_bound(U0.begin(), U0.end(), level);
  const auto i = static_cast<std::size_t>(std::distance(U0.begin(), it));
  double s = z[i];
  for (int k = 0; k < 4; ++k) s -= (eval_U0(s) - level) / eval_dU0(s);
  return s;
}

double default_profile_extent(const BistableModel& model) {
  const double slope =
      std::min(std::abs(model.nl.slice_du(-1.0)), std::abs(model.nl.slice_du(1.0)));
  return 16.0 / std::sqrt(slope);
}

ProfileTable standing_wave(const BistableModel& model, double z_max, int n) {
  if (z_max <= 0.0) z_max = default_profile_extent(model);
  if (n < 2001 || n % 2 == 0) throw Error(ErrorKind::ConfigInvalid, "profile size must be odd and >= 2001");

  ProfileTable p;
  p.z_max = z_max;
  p.dz = 2.0 * z_max / (n - 1);
  p.z.resize(n);
  for (int i = 0; i < n; ++i) p.z[i] = -z_max + i * p.dz;
  p.U0.assign(n, 0.0);

  // First integral U0' = [2(W(U0) - W(-1))]^{1/2}, integrated outward from U0(0) = a.
  // Both directions are stable because the wells are attracting for this flow.
  auto rhs = [&](double, const State<1>& s) {
    const double u = s[0];
    if (u >= model.u_plus || u <= model.u_minus) return State<1>{0.0};
    return State<1>{std::sqrt(model.potential_gap(u))};
  };
  OdeOptions opt;
  opt.rtol = 1e-13;
  opt.atol = 1e-16;
  opt.initial_step = 1e-3;
  const int mid = (n - 1) / 2;
  p.U0[mid] = model.a;
  State<1> y{model.a};
  for (int i = mid + 1; i < n; ++i) {
    y = dopri5<1>(rhs, y, p.z[i - 1], p.z[i], opt);
    p.U0[i] = y[0];
  }
  y = State<1>{model.a};
  for (int i = mid - 1; i >= 0; --i) {
    y = dopri5<1>(rhs, y, p.z[i + 1], p.z[i], opt);
    p.U0[i] = y[0];
  }
  p.U0[mid] = model.a;

  p.dU0.resize(n);
  p.d2U0.resize(n);
  for (int i = 0; i < n; ++i) {
    p.dU0[i] = std::sqrt(model.potential_gap(p.U0[i]));
    p.d2U0[i] = -model.nl.slice(p.U0[i]);
  }
  for (int i = 1; i < n; ++i)
    if (!(p.U0[i] > p.U0[i - 1]))
      throw Error(ErrorKind::QuadratureSingular, "standing wave lost monotonicity");

  // Tail rates from the log-slope of 1 -/+ U0 on |z| in [Z/2, Z].
  std::vector<double> xs, ys;
  for (int i = mid + mid / 2; i < n; ++i) {
    xs.push_back(p.z[i]);
    ys.push_back(std::log(1.0 - p.U0[i]));
  }
  const auto fp = fit_line(xs, ys);
  xs.clear();
  ys.clear();
  for (int i = 0; i <= mid / 2; ++i) {
    xs.push_back(p.z[i]);
    ys.push_back(std::log(p.U0[i] + 1.0));
  }
  const auto fm = fit_line(xs, ys);
  p.lambda_plus = -fp.slope;
  p.lambda_minus = fm.slope;
  p.lambda = std::min(p.lambda_plus, p.lambda_minus);
  // Tail constants matched at the table ends so the extension is continuous.
  p.tail_plus = (1.0 - p.U0.back()) * std::exp(p.lambda_plus * z_max);
  p.tail_minus = (p.U0.front() + 1.0) * std::exp(p.lambda_minus * z_max);
  return p;
}

CorrectorBounds corrector(const BistableModel& model, ProfileTable& p) {
  const std::size_t n = p.size();
  const auto& nl = model.nl;
  const double h = p.dz;

  // c0 with the exponential tails beyond +-Z added back in closed form.
  std::vector<double> num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    num[i] = nl.f_v(p.U0[i], 0.0) * p.dU0[i];
    den[i] = p.dU0[i] * p.dU0[i];
  }
  double numerator = trapezoid(num, h);
  numerator += nl.f_v(1.0, 0.0) * (1.0 - p.U0.back()) + nl.f_v(-1.0, 0.0) * (p.U0.front() + 1.0);
  double denominator = trapezoid(den, h);
  denominator += p.dU0.back() * p.dU0.back() / (2.0 * p.lambda_plus) +
                 p.dU0.front() * p.dU0.front() / (2.0 * p.lambda_minus);
  p.c0 = -numerator / denominator + 0.0;  // no negative zero when f does not depend on v

  std::vector<double> g(n), gd(n), g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = -nl.f_v(p.U0[i], 0.0) - p.c0 * p.dU0[i];
    gd[i] = g[i] * p.dU0[i];
    g2[i] = g[i] * g[i];
  }
  const double g_norm = std::sqrt(trapezoid(g2, h));
  // The tail of g dU0 is accounted for by the same closed form used for c0.
  double orth = trapezoid(gd, h);
  orth += -nl.f_v(1.0, 0.0) * (1.0 - p.U0.back()) - nl.f_v(-1.0, 0.0) * (p.U0.front() + 1.0) -
          p.c0 * (p.dU0.back() * p.dU0.back() / (2.0 * p.lambda_plus) +
                  p.dU0.front() * p.dU0.front() / (2.0 * p.lambda_minus));
  p.fredholm_residual = g_norm > 0 ? std::abs(orth) / g_norm : 0.0;
  if (p.fredholm_residual > 1e-8)
    throw Error(ErrorKind::FredholmViolation,
                "right-hand side not orthogonal to U0': " + std::to_string(p.fredholm_residual));

  p.V_plus_inf = -nl.f_v(1.0, 0.0) / nl.slice_du(1.0);
  p.V_minus_inf = -nl.f_v(-1.0, 0.0) / nl.slice_du(-1.0);

  // V'' + f~'(U0) V = g with V(+-Z) at the bounded asymptotes; the equation at
  // z = 0 is replaced by V(0) = 0. Solving on the full interval and removing the
  // dU0 component afterwards would go through a nearly singular operator whose
  // kernel is dU0 up to exp(-2 lambda Z).
  const std::size_t mid = (n - 1) / 2;
  std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs(n, 0.0);
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (i == mid) continue;
    lo[i] = inv_h2;
    up[i] = inv_h2;
    di[i] = -2.0 * inv_h2 + nl.slice_du(p.U0[i]);
    rhs[i] = g[i];
  }
  rhs[0] = p.V_minus_inf;
  rhs[n - 1] = p.V_plus_inf;
  rhs[mid] = 0.0;

  std::vector<double> c(n), d(n);
  c[0] = up[0] / di[0];
  d[0] = rhs[0] / di[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = di[i] - lo[i] * c[i - 1];
    if (denom == 0.0) throw Error(ErrorKind::IllConditioned, "zero pivot in corrector solve");
    c[i] = up[i] / denom;
    d[i] = (rhs[i] - lo[i] * d[i - 1]) / denom;
  }
  p.V.assign(n, 0.0);
  p.V[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) p.V[i] = d[i] - c[i] * p.V[i + 1];

  double res = 0.0;
  double g_inf = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    g_inf = std::max(g_inf, std::abs(g[i]));
    if (i == mid) continue;
    const double r = lo[i] * p.V[i - 1] + di[i] * p.V[i] + up[i] * p.V[i + 1] - rhs[i];
    res = std::max(res, std::abs(r));
  }
  if (res > 1e-8 * std::max(1.0, g_inf))
    throw Error(ErrorKind::IllConditioned, "corrector residual " + std::to_string(res));

  p.dV.resize(n);
  p.d2V.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0)
      p.dV[i] = (p.V[1] - p.V[0]) / h;
    else if (i == n - 1)
      p.dV[i] = (p.V[n - 1] - p.V[n - 2]) / h;
    else
      p.dV[i] = (p.V[i + 1] - p.V[i - 1]) / (2 * h);
    p.d2V[i] = g[i] - nl.slice_du(p.U0[i]) * p.V[i];
  }

  p.M_bound = 0.0;
  p.dV_decay = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.M_bound = std::max(p.M_bound, std::abs(p.V[i]));
    p.dV_decay = std::max(p.dV_decay, (std::abs(p.dV[i]) + std::abs(p.d2V[i])) *
                                          std::exp(p.lambda * std::abs(p.z[i])));
  }
  return {p.M_bound, p.dV_decay, p.fredholm_residual, res};
}

double intrinsic_c0(const BistableModel& model) {
  const double num =
      integrate_gk([&](double u) { return model.nl.f_v(u, 0.0); }, -1.0, 1.0, 1e-14);
  const double den = integrate_gk(
      [&](double u) { return std::sqrt(model.potential_gap(u)); }, -1.0, 1.0, 1e-14);
  return -num / den + 0.0;
}

void complete_with_profile(BistableModel& model, const ProfileTable& p) {
  double a1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.U0[i] >= -1.0 + model.b && p.U0[i] <= 1.0 - model.b) a1 = std::min(a1, p.dU0[i]);
  model.a1 = std::isfinite(a1) ? a1 : 0.0;
}

Profile1D build_profile(const Nonlinearity& nl, const AnalyzeOptions& opts) {
  Profile1D out{analyze_nonlinearity(nl, opts), {}};
  out.table = standing_wave(out.model);
  corrector(out.model, out.table);
  complete_with_profile(out.model, out.table);
  return out;
}

void write_profile_csv(std::ostream& out, const ProfileTable& t) {
  out << std::setprecision(17);
  out << "# c0=" << t.c0 << "\n# lambda=" << t.lambda << "\n# Mbound=" << t.M_bound << "\n";
  out << "z,U0,dU0,d2U0,V,dV\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t.z[i] << ',' << t.U0[i] << ',' << t.dU0[i] << ',' << t.d2U0[i] << ','
        << (t.V.empty() ? 0.0 : t.V[i]) << ',' << (t.dV.empty() ? 0.0 : t.dV[i]) << '\n';
  }
}

}  // namespace nlac

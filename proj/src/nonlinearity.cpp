#include <algorithm>
#include <cmath>

#include "nlac/error.hpp"
#include "nlac/numerics.hpp"
#include "nlac/profile.hpp"

namespace nlac {

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs, double coupling) {
  auto horner = [](const std::vector<double>& c, double u) {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * u + *it;
    return s;
  };
  auto derive = [](const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    return d;
  };
  const auto d1 = derive(coeffs);
  const auto d2 = derive(d1);
  Nonlinearity nl;
  nl.f = [=](double u, double v) { return horner(coeffs, u) + coupling * v; };
  nl.f_u = [=](double u, double) { return horner(d1, u); };
  nl.f_v = [=](double, double) { return coupling; };
  nl.f_uu = [=](double u, double) { return horner(d2, u); };
  nl.f_uv = [](double, double) { return 0.0; };
  nl.f_vv = [](double, double) { return 0.0; };
  return nl;
}

Nonlinearity Nonlinearity::from_function(Fn f, double step) {
  Nonlinearity nl;
  const double h = step;
  nl.f = f;
  nl.f_u = [f, h](double u, double v) { return (f(u + h, v) - f(u - h, v)) / (2 * h); };
  nl.f_v = [f, h](double u, double v) { return (f(u, v + h) - f(u, v - h)) / (2 * h); };
  const double h2 = std::cbrt(h) * 1e-2;
  nl.f_uu = [f, h2](double u, double v) {
    return (f(u + h2, v) - 2 * f(u, v) + f(u - h2, v)) / (h2 * h2);
  };
  nl.f_vv = [f, h2](double u, double v) {
    return (f(u, v + h2) - 2 * f(u, v) + f(u, v - h2)) / (h2 * h2);
  };
  nl.f_uv = [f, h2](double u, double v) {
    return (f(u + h2, v + h2) - f(u + h2, v - h2) - f(u - h2, v + h2) + f(u - h2, v - h2)) /
           (4 * h2 * h2);
  };
  return nl;
}

namespace {

// Zeros of f~ + delta on [lo, hi], located on a slightly offset sampling grid so
// that roots sitting on round numbers never coincide with a sample.
std::vector<double> zeros_of(const Nonlinearity& nl, double delta, double lo, double hi,
                             int samples = 6000) {
  auto g = [&](double u) { return nl.slice(u) + delta; };
  auto dg = [&](double u) { return nl.slice_du(u); };
  const double h = (hi - lo) / samples;
  const double offset = 1e-3 * M_PI * h;
  std::vector<double> roots;
  double u_prev = lo + offset;
  double g_prev = g(u_prev);
  for (int i = 1; i <= samples; ++i) {
    const double u = lo + offset + i * h;
    const double gu = g(u);
    if ((g_prev < 0) != (gu < 0)) roots.push_back(find_root(g, u_prev, u, dg));
    u_prev = u;
    g_prev = gu;
  }
  return roots;
}

}  // namespace

double BistableModel::eta0() const { return std::min(a + 1.0, 1.0 - a); }

double BistableModel::potential_gap(double u) const {
  auto slice = [this](double s) { return nl.slice(s); };
  if (u <= u_minus || u >= u_plus) return 0.0;
  const double gap = u <= a ? -2.0 * integrate_gk(slice, u_minus, u, 1e-17)
                            : 2.0 * integrate_gk(slice, u, u_plus, 1e-17);
  return std::max(gap, 0.0);
}

BistableModel analyze_nonlinearity(const Nonlinearity& nl, const AnalyzeOptions& opts) {
  BistableModel model;
  model.nl = nl;
  model.C0 = std::max(1.0, opts.c0_bound);
  model.domain_area = opts.domain_area;

  const double balance = integrate_gk([&](double u) { return nl.slice(u); }, -1.0, 1.0, 1e-14);
  if (std::abs(balance) > opts.balance_tol)
    throw Error(ErrorKind::Unbalanced,
                "integral of f(u,0) over [-1,1] is " + std::to_string(balance));

  const auto roots = zeros_of(nl, 0.0, -2.0, 2.0);
  if (roots.size() != 3)
    throw Error(ErrorKind::NotBistable,
                "f(u,0) has " + std::to_string(roots.size()) + " zeros on [-2,2]");
  if (!(nl.slice_du(roots[0]) < 0 && nl.slice_du(roots[1]) > 0 && nl.slice_du(roots[2]) < 0))
    throw Error(ErrorKind::NotBistable, "wrong sign pattern of f'(u,0) at the zeros");
  if (std::abs(roots[0] + 1.0) > opts.zero_tol || std::abs(roots[2] - 1.0) > opts.zero_tol)
    throw Error(ErrorKind::NotBistable, "stable zeros are not at -1 and +1");

  model.a = roots[1];
  model.mu = nl.slice_du(model.a);
  model.m = 0.5 * std::min(std::abs(nl.slice_du(-1.0)), std::abs(nl.slice_du(1.0)));

  // Band widths where f~' stays below -m, walked inward from each well.
  const double du = 1e-5;
  double b_left = 0.0;
  while (b_left < 0.5 && nl.slice_du(-1.0 + b_left + du) <= -model.m) b_left += du;
  double b_right = 0.0;
  while (b_right < 0.5 && nl.slice_du(1.0 - b_right - du) <= -model.m) b_right += du;
  model.b = std::min({b_left, b_right, 0.5});

  for (int i = 0; i <= 2000; ++i) {
    const double u = -1.0 + i * 1e-3;
    model.F1 = std::max(model.F1, std::abs(nl.slice_du(u)));
  }

  double hmax = 0.0;
  double fv_max = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double u = -3.0 + 6.0 * i / 400.0;
    const double uG = -2.0 * model.C0 + 4.0 * model.C0 * i / 400.0;
    for (int j = 0; j <= 40; ++j) {
      const double v = -1.0 + 2.0 * j / 40.0;
      hmax = std::max({hmax, std::abs(nl.f_uu(u, v)), std::abs(nl.f_uv(u, v)),
                       std::abs(nl.f_vv(u, v))});
      fv_max = std::max(fv_max, std::abs(nl.f_v(uG, v)));
    }
  }
  model.H = hmax;
  model.G = 2.0 * model.C0 * model.domain_area * fv_max;

  for (int k = 0; k <= 30; ++k) {
    const double d = std::ldexp(1.0, -k);
    if (zeros_of(nl, d, -3.0, 3.0).size() == 3 && zeros_of(nl, -d, -3.0, 3.0).size() == 3) {
      model.delta0 = 0.5 * d;
      break;
    }
  }
  return model;
}

PerturbedZeros perturbed_zeros(const BistableModel& model, double delta) {
  const auto roots = zeros_of(model.nl, delta, -3.0, 3.0);
  if (roots.size() != 3)
    throw Error(ErrorKind::DeltaTooLarge,
                "f(u,0)+delta has " + std::to_string(roots.size()) + " zeros");
  return {roots[0], roots[1], roots[2], model.nl.slice_du(roots[1])};
}

FlowValue ode_flow(const BistableModel& model, double tau, double xi, double delta) {
  if (tau < 0) throw Error(ErrorKind::FlowFailure, "negative tau");
  if (tau == 0.0) return {xi, 1.0, 0.0};
  const auto& nl = model.nl;
  auto rhs = [&](double, const State<3>& s) {
    const double fp = nl.slice_du(s[0]);
    return State<3>{nl.slice(s[0]) + delta, fp * s[1],
                    nl.slice_du2(s[0]) * s[1] * s[1] + fp * s[2]};
  };
  OdeOptions opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-14;
  opt.initial_step = std::min(1e-2, tau);
  const State<3> end = dopri5<3>(rhs, State<3>{xi, 1.0, 0.0}, 0.0, tau, opt);
  if (!std::isfinite(end[0]) || !std::isfinite(end[1]) || !std::isfinite(end[2]))
    throw Error(ErrorKind::StiffnessFailure, "non-finite flow");
  return {end[0], end[1], end[2] / end[1]};
}

}  // namespace nlac

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "nlac/error.hpp"

namespace nlac {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  double last_step = 0.0;
};

/// Dormand-Prince 5(4) with PI-free classic step control.
///
/// Integrates y' = rhs(t, y) from t0 to t1 (t1 may be below t0). The optional
/// observer sees every accepted step and may return false to stop early; the
/// returned state is then the one at the stopping time, written to `t_stop`.
/// Throws StiffnessFailure when the controller drives the step below min_step.
template <std::size_t N, class Rhs>
State<N> dopri5(Rhs&& rhs, State<N> y, double t0, double t1, const OdeOptions& opt,
                const std::function<bool(double, const State<N>&)>& observer = {},
                double* t_stop = nullptr, OdeStats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t_stop) *t_stop = t1;
  if (t0 == t1) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double h = std::min({opt.initial_step, span, opt.max_step});
  double t = t0;
  State<N> k1 = rhs(t, y), k2, k3, k4, k5, k6, k7, tmp, ynew;
  long steps = 0;
  OdeStats local;

  while (dir * (t1 - t) > 0.0) {
    if (++steps > opt.max_steps) throw Error(ErrorKind::StiffnessFailure, "step budget exhausted");
    const double remaining = std::abs(t1 - t);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    const double hs = dir * h;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    k2 = rhs(t + c2 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs(t + hs, ynew);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei =
          hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      t = last ? t1 : t + hs;
      y = ynew;
      k1 = k7;
      ++local.accepted;
      local.last_step = h;
      if (observer && !observer(t, y)) {
        if (t_stop) *t_stop = t;
        break;
      }
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * fac, opt.max_step);
    } else {
      ++local.rejected;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (h < opt.min_step) throw Error(ErrorKind::StiffnessFailure, "step size underflow");
    }
  }
  if (stats) *stats = local;
  return y;
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of a smooth integrand on [a, b].
/// Accepts a panel when the Gauss/Kronrod gap is below abs_tol or 1e-14 relative.
double integrate_gk(const std::function<double(double)>& g, double a, double b,
                    double abs_tol = 1e-13, int max_depth = 14);

/// Composite trapezoid rule on a uniform grid with spacing h.
double trapezoid(std::span<const double> values, double h);

/// Bisection on a sign-changing bracket, finished by safeguarded Newton when a
/// derivative is available.
double find_root(const std::function<double(double)>& g, double lo, double hi,
                 const std::function<double(double)>& dg = {}, double tol = 1e-14);

/// Least-squares line y = slope * x + intercept, with coefficient of determination.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace nlac

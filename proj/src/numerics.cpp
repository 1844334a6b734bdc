#include "nlac/numerics.hpp"

namespace nlac {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& g, double a, double b, double& kronrod,
          double& gauss) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double fc = g(c);
  kronrod = fc * kWgk[7];
  gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = r * kXgk[j];
    const double s = g(c - dx) + g(c + dx);
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kronrod *= r;
  gauss *= r;
}

double gk_recurse(const std::function<double(double)>& g, double a, double b, double tol,
                  int depth) {
  double k = 0.0, q = 0.0;
  gk15(g, a, b, k, q);
  if (std::abs(k - q) <= std::max(tol, 1e-14 * std::abs(k)) || depth <= 0) {
    if (!std::isfinite(k)) throw Error(ErrorKind::QuadratureSingular, "non-finite integrand");
    return k;
  }
  const double m = 0.5 * (a + b);
  return gk_recurse(g, a, m, 0.5 * tol, depth - 1) + gk_recurse(g, m, b, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_gk(const std::function<double(double)>& g, double a, double b, double abs_tol,
                    int max_depth) {
  if (a == b) return 0.0;
  max_depth = std::min(max_depth, 14);
  return gk_recurse(g, a, b, abs_tol, max_depth);
}

double trapezoid(std::span<const double> values, double h) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * h;
}

double find_root(const std::function<double(double)>& g, double lo, double hi,
                 const std::function<double(double)>& dg, double tol) {
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) throw Error(ErrorKind::NotBistable, "root not bracketed");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, std::abs(x)); ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if ((gx > 0) == (glo > 0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
    }
    double next = 0.5 * (lo + hi);
    if (dg) {
      const double d = dg(x);
      if (d != 0.0) {
        const double newton = x - gx / d;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (next == x) break;
    x = next;
  }
  return x;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace nlac

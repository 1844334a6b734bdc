#include "nlac/interface_limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlac/error.hpp"
#include "nlac/numerics.hpp"
#include "nlac/parallel.hpp"

namespace nlac {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRegularization = 1e-8;
constexpr double kReinitBand = 5.0;  // in grid spacings

int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

// Both phases must cover more than a few nodes; smaller islands are below
// grid resolution and the curvature term cannot move them.
bool changes_sign(const std::vector<double>& phi) {
  constexpr std::size_t kMinNodes = 5;
  std::size_t neg = 0, pos = 0;
  for (double v : phi) {
    neg += v < 0 ? 1 : 0;
    pos += v > 0 ? 1 : 0;
  }
  return neg >= kMinNodes && pos >= kMinNodes;
}

}  // namespace

Field2D LevelSetState::as_field() const {
  Field2D f(grid, 0.0, time);
  f.values = phi;
  return f;
}

LevelSetState levelset_from_contour(const Contour& c, const Grid2D& grid, double c0,
                                    double domain_area, int workers) {
  const auto sd = signed_distance(c, grid, 1.0, workers);
  return LevelSetState{grid, sd.raw, 0.0, c0, domain_area};
}

double levelset_gamma(const LevelSetState& s) {
  const auto& g = s.grid;
  const double w = 1.5 * g.h();
  Field2D sign(g);
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    const double p = s.phi[k];
    double H;
    if (p <= -w)
      H = 0.0;
    else if (p >= w)
      H = 1.0;
    else
      H = 0.5 * (1.0 + p / w + std::sin(kPi * p / w) / kPi);
    sign.values[k] = 2.0 * H - 1.0;
  }
  return mass(sign);
}

double levelset_default_dt(const Grid2D& grid) { return 0.2 * grid.h() * grid.h() / 4.0; }

LevelSetState levelset_step(const LevelSetState& s, double dt, int workers) {
  const auto& g = s.grid;
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  const double kappa_cap = 1.0 / g.h();
  const double F = s.c0 * levelset_gamma(s);
  const auto& phi = s.phi;
  auto at = [&](int i, int j) { return phi[g.index(reflect(i, nx), reflect(j, ny))]; };

  LevelSetState out = s;
  out.time = s.time + dt;
  parallel_rows(static_cast<std::size_t>(ny), workers, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < nx; ++i) {
      const double c = at(i, j);
      const double e = at(i + 1, j), w = at(i - 1, j), n = at(i, j + 1), so = at(i, j - 1);
      const double px = (e - w) / (2 * hx), py = (n - so) / (2 * hy);
      const double pxx = (e - 2 * c + w) / (hx * hx), pyy = (n - 2 * c + so) / (hy * hy);
      const double pxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) /
                         (4 * hx * hy);
      const double g2 = px * px + py * py + kRegularization * kRegularization;
      const double gn = std::sqrt(g2);
      double kappa = (pxx * py * py - 2 * px * py * pxy + pyy * px * px) / (g2 * gn);
      kappa = std::clamp(kappa, -kappa_cap, kappa_cap);

      double forcing = 0.0;
      if (F != 0.0) {
        const double dxm = (c - w) / hx, dxp = (e - c) / hx;
        const double dym = (c - so) / hy, dyp = (n - c) / hy;
        double grad;
        if (F > 0)
          grad = std::sqrt(std::pow(std::max(dxm, 0.0), 2) + std::pow(std::min(dxp, 0.0), 2) +
                           std::pow(std::max(dym, 0.0), 2) + std::pow(std::min(dyp, 0.0), 2));
        else
          grad = std::sqrt(std::pow(std::min(dxm, 0.0), 2) + std::pow(std::max(dxp, 0.0), 2) +
                           std::pow(std::min(dym, 0.0), 2) + std::pow(std::max(dyp, 0.0), 2));
        forcing = F * grad;
      }
      out.phi[g.index(i, j)] = c + dt * (kappa * gn - forcing);
    }
  });
  if (!changes_sign(out.phi))
    throw Error(ErrorKind::InterfaceVanished, "level set lost its zero level");
  return out;
}

Contour levelset_contour(const LevelSetState& s) { return extract_contour(s.as_field(), 0.0); }

LevelSetState reinitialize(const LevelSetState& s, int workers) {
  LevelSetState out = s;
  Contour zero = extract_contour(s.as_field(), 0.0, EdgeInterp::Cubic);
  for (auto& loop : zero.loops) {
    std::vector<Point> kept;
    for (const Point& p : loop.points)
      if (kept.empty() || std::hypot(p.x - kept.back().x, p.y - kept.back().y) > 0.3 * s.grid.h())
        kept.push_back(p);
    if (kept.size() >= 4) loop.points = std::move(kept);
  }
  // |phi| / max|grad phi| never exceeds the true distance, so it is a safe
  // hint for skipping far nodes.
  const auto& g = s.grid;
  double lip = 1.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double px = (s.phi[g.index(reflect(i + 1, g.nx), j)] -
                         s.phi[g.index(reflect(i - 1, g.nx), j)]) / (2 * g.hx());
      const double py = (s.phi[g.index(i, reflect(j + 1, g.ny))] -
                         s.phi[g.index(i, reflect(j - 1, g.ny))]) / (2 * g.hy());
      lip = std::max(lip, std::hypot(px, py));
    }
  std::vector<double> hint(s.phi.size());
  for (std::size_t k = 0; k < hint.size(); ++k) hint[k] = s.phi[k] / lip;
  out.phi = signed_distance(refine_contour(zero, 8), g, 1.0, workers, kReinitBand * g.h(), &hint).raw;
  return out;
}

LevelSetState levelset_evolve(const LevelSetState& initial, double t_end,
                              const LevelSetOptions& opts,
                              const std::function<bool(const LevelSetState&)>& observer) {
  const double dt = opts.dt > 0 ? opts.dt : levelset_default_dt(initial.grid);
  const double t0 = initial.time;
  const long n = t_end > t0 ? static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9)) : 0;
  LevelSetState s = initial;
  if (observer && !observer(s)) return s;
  for (long k = 1; k <= n; ++k) {
    const double t_next = k == n ? t_end : t0 + k * dt;
    s = levelset_step(s, t_next - s.time, opts.workers);
    s.time = t_next;
    if (opts.reinit_every > 0 && k % opts.reinit_every == 0) s = reinitialize(s, opts.workers);
    if (observer && !observer(s)) break;
  }
  return s;
}

double radial_velocity(double R, double c0, double domain_area) {
  return -1.0 / R + c0 * (domain_area - 2 * kPi * R * R);
}

namespace {

double s_rate(double S, double c0, double A) {
  const double Sp = std::max(S, 0.0);
  return -2.0 + 2.0 * c0 * std::sqrt(Sp) * (A - 2 * kPi * Sp);
}

}  // namespace

double RadialSeries::radius_at(double time) const {
  if (t.empty()) return 0.0;
  if (extinct && time >= extinction_time) return 0.0;
  if (time <= t.front()) return R.front();
  if (time >= t.back()) return R.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  const double h = t[k + 1] - t[k];
  const double s = (time - t[k]) / h;
  const double S0 = R[k] * R[k], S1 = R[k + 1] * R[k + 1];
  const double d0 = s_rate(S0, c0, domain_area) * h, d1 = s_rate(S1, c0, domain_area) * h;
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  return std::sqrt(std::max(0.0, h00 * S0 + h10 * d0 + h01 * S1 + h11 * d1));
}

RadialSeries radial_evolve(double R0, double c0, double domain_area, double t_end, double dt_out,
                           double R_max) {
  if (!(R0 > 0)) throw Error(ErrorKind::ConfigInvalid, "initial radius must be positive");
  if (!(dt_out > 0)) throw Error(ErrorKind::ConfigInvalid, "output interval must be positive");
  if (R_max <= 0) R_max = std::sqrt(domain_area / kPi);
  if (R0 >= R_max) throw Error(ErrorKind::BadInterface, "initial circle does not fit the domain");

  RadialSeries out;
  out.c0 = c0;
  out.domain_area = domain_area;
  auto record = [&](double t, double S) {
    const double R = std::sqrt(std::max(S, 0.0));
    out.t.push_back(t);
    out.R.push_back(R);
    out.gamma.push_back(domain_area - 2 * kPi * R * R);
  };

  const auto rhs = [&](double, const State<1>& y) { return State<1>{s_rate(y[0], c0, domain_area)}; };
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-15;
  opt.initial_step = std::min(dt_out, 1e-4);
  const double S_floor = 1e-8 * R0 * R0;

  State<1> y{R0 * R0};
  double t = 0.0;
  record(t, y[0]);
  const long n = static_cast<long>(std::ceil(t_end / dt_out - 1e-9));
  for (long k = 1; k <= n; ++k) {
    const double t1 = k == n ? t_end : k * dt_out;
    double stop = t1;
    bool hit_max = false;
    y = dopri5<1>(rhs, y, t, t1, opt,
                  [&](double, const State<1>& s) {
                    hit_max = s[0] > R_max * R_max;
                    return s[0] > S_floor && !hit_max;
                  },
                  &stop);
    if (hit_max) throw Error(ErrorKind::BadInterface, "radial interface left the domain");
    if (y[0] <= S_floor) {
      out.extinct = true;
      out.extinction_time = stop - y[0] / s_rate(y[0], c0, domain_area);
      record(out.extinction_time, 0.0);
      return out;
    }
    t = t1;
    record(t, y[0]);
  }
  return out;
}

std::vector<SteadyState> radial_steady_states(double c0, double domain_area) {
  std::vector<SteadyState> roots;
  if (c0 <= 0) return roots;
  const double R_max = std::sqrt(domain_area / kPi);
  const auto g = [&](double R) { return radial_velocity(R, c0, domain_area); };
  const auto dg = [&](double R) { return 1.0 / (R * R) - 4 * kPi * c0 * R; };
  constexpr int kScan = 20000;
  double lo = R_max * 1e-6, glo = g(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double hi = R_max * k / kScan;
    const double ghi = g(hi);
    if ((glo < 0) != (ghi < 0)) {
      const double R = find_root(g, lo, hi, dg, 1e-14);
      roots.push_back({R, dg(R) < 0});
    }
    lo = hi;
    glo = ghi;
  }
  return roots;
}

}  // namespace nlac

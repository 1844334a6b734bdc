#include "nlac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "nlac/error.hpp"
#include "nlac/parallel.hpp"

namespace nlac {

namespace {

constexpr double kPi = std::numbers::pi;

const char* shape_name(InitialShape s) {
  switch (s) {
    case InitialShape::Circle: return "circle";
    case InitialShape::Ellipse: return "ellipse";
    case InitialShape::Constant: return "constant";
  }
  return "circle";
}

}  // namespace

InitialDataSpec StudySpec::default_data() {
  InitialDataSpec d;
  d.shape = InitialShape::Circle;
  d.cx = 0.5;
  d.cy = 0.5;
  d.r0 = 0.35;
  d.width = 0.3;
  return d;
}

Nonlinearity StudySpec::nonlinearity() const { return Nonlinearity::polynomial(coefficients, coupling); }

Profile1D StudySpec::profile() const {
  AnalyzeOptions opts;
  opts.domain_area = Lx * Ly;
  return build_profile(nonlinearity(), opts);
}

Grid2D StudySpec::grid_for(double epsilon) const {
  if (!(epsilon > 0) || !(h_ratio > 0)) throw Error(ErrorKind::ConfigInvalid, "epsilon and h ratio must be positive");
  const double h = h_ratio * epsilon;
  const int nx = static_cast<int>(std::ceil(Lx / h - 1e-9)) + 1;
  const int ny = static_cast<int>(std::ceil(Ly / h - 1e-9)) + 1;
  Grid2D g{nx, ny, Lx, Ly};
  g.validate();
  return g;
}

nlohmann::json StudySpec::canonical() const {
  return {{"coefficients", coefficients},
          {"coupling", coupling},
          {"Lx", Lx},
          {"Ly", Ly},
          {"data",
           {{"shape", shape_name(data.shape)},
            {"cx", data.cx},
            {"cy", data.cy},
            {"r0", data.r0},
            {"semi_a", data.semi_a},
            {"semi_b", data.semi_b},
            {"angle", data.angle},
            {"width", data.width},
            {"constant", data.constant},
            {"cutoff", data.cutoff}}},
          {"h_ratio", h_ratio},
          {"scheme", scheme == Scheme::Explicit ? "explicit" : "imex"},
          {"M0", M0}};
}

double generation_time(const BistableModel& model, double epsilon) {
  return epsilon * epsilon * std::abs(std::log(epsilon)) / model.mu;
}

double interface_gradient_floor(const InitialDataSpec& data, double Lx, double Ly, double a) {
  const Grid2D fine{401, 401, Lx, Ly};
  Field2D u(fine);
  for (int j = 0; j < fine.ny; ++j)
    for (int i = 0; i < fine.nx; ++i) u.at(i, j) = data(fine.x(i), fine.y(j), Lx, Ly);
  const Contour c = extract_contour(u, a, EdgeInterp::Cubic);
  const double step = 1e-6 * std::min(Lx, Ly);
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& loop : c.loops)
    for (const Point& p : loop.points) {
      const double x = std::clamp(p.x, step, Lx - step), y = std::clamp(p.y, step, Ly - step);
      const double gx = (data(x + step, y, Lx, Ly) - data(x - step, y, Lx, Ly)) / (2 * step);
      const double gy = (data(x, y + step, Lx, Ly) - data(x, y - step, Lx, Ly)) / (2 * step);
      floor = std::min(floor, std::hypot(gx, gy));
    }
  if (!(floor > 1e-12)) throw Error(ErrorKind::BadInterface, "initial data are flat on the interface");
  return floor;
}

double band_constant_M1(const InitialDataSpec& data, double Lx, double Ly, double a, double M0) {
  if (!(M0 > 0)) throw Error(ErrorKind::ConfigInvalid, "M0 must be positive");
  return M0 / interface_gradient_floor(data, Lx, Ly, a);
}

std::vector<double> initial_distance(const Field2D& u0, double a, int workers) {
  const Contour c = refine_contour(extract_contour(u0, a, EdgeInterp::Cubic), 4);
  return signed_distance(c, u0.grid, 1.0, workers).raw;
}

// ---------------------------------------------------------------------------

nlohmann::json MotionConstants::to_json() const {
  return {{"beta", beta}, {"sigma", sigma}, {"sigma0", sigma0}, {"sigma1", sigma1},
          {"sigma2", sigma2}, {"K", K},     {"L", L},           {"eps0", eps0},
          {"d0", d0},     {"M", M},         {"eta", eta},       {"M1", M1},
          {"T", T}};
}

MotionConstants compute_motion_constants(const BistableModel& model, const ProfileTable& profile,
                                         double T, double eta, double M1, double d0) {
  if (!profile.has_corrector()) throw Error(ErrorKind::ConfigInvalid, "profile lacks the corrector");
  if (!(eta > 0) || !(eta < model.eta0())) throw Error(ErrorKind::ConfigInvalid, "eta must lie in (0, eta0)");
  if (!(T > 0) || !(d0 > 0) || !(M1 >= 0)) throw Error(ErrorKind::ConfigInvalid, "T, d0 must be positive and M1 >= 0");

  MotionConstants k;
  k.eta = eta;
  k.M1 = M1;
  k.T = T;
  k.d0 = d0;
  k.M = profile.M_bound;
  k.beta = model.m / 4;
  k.sigma0 = model.a1 / (model.m + model.F1);
  k.sigma1 = 1 / (k.beta + 1);
  k.sigma2 = model.H > 0 ? 4 * k.beta / (model.H * (k.beta + 1)) : k.sigma1;
  k.sigma = std::min({k.sigma0, k.sigma1, k.sigma2});
  if (k.sigma * k.beta > eta / 3) k.sigma = eta / (3 * k.beta);

  const double margin = k.sigma * k.beta / 3;
  const double up = model.u_plus - margin, down = model.u_minus + margin;
  if (profile.eval_U0(profile.z_max) < up || profile.eval_U0(-profile.z_max) > down)
    throw Error(ErrorKind::NoAdmissibleK, "U0 table does not reach within sigma beta / 3 of the wells");
  auto admissible = [&](double K) {
    return profile.eval_U0(K - M1) >= up && profile.eval_U0(M1 - K) <= down;
  };
  double lo = 1.0, hi = M1 + profile.z_max + 1.0;
  if (admissible(lo)) {
    k.K = std::nextafter(1.0, 2.0);
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (admissible(mid) ? hi : lo) = mid;
    }
    k.K = hi;
  }

  double eps0 = d0 / (4 * k.K);
  if (k.M > 0) eps0 = std::min({eps0, k.sigma * k.beta / (6 * k.M), 1 / k.M});
  for (int it = 0; it < 200; ++it) {
    const double L = std::log(d0 / (4 * eps0)) / T;
    const bool ga = std::exp(L * T) + k.K <= d0 / (2 * eps0) * (1 + 1e-12);
    if (ga && eps0 * eps0 * L * std::exp(L * T) <= 1) break;
    eps0 /= 2;
  }
  k.eps0 = eps0;
  k.L = std::log(d0 / (4 * eps0)) / T;
  return k;
}

double motion_p(const MotionConstants& k, double epsilon, double t) {
  return -std::exp(-k.beta * t / (epsilon * epsilon)) + std::exp(k.L * t) + k.K;
}

double motion_dp(const MotionConstants& k, double epsilon, double t) {
  const double e2 = epsilon * epsilon;
  return k.beta / e2 * std::exp(-k.beta * t / e2) + k.L * std::exp(k.L * t);
}

double motion_q(const MotionConstants& k, double epsilon, double t) {
  const double e2 = epsilon * epsilon;
  return k.sigma * (k.beta * std::exp(-k.beta * t / e2) + e2 * k.L * std::exp(k.L * t));
}

// ---------------------------------------------------------------------------

namespace {

struct GenerationKernel {
  const BistableModel* model;
  double epsilon;
  double Cstar;
  double delta;
  double mu_plus;   // mu(+eps G)
  double mu_minus;  // mu(-eps G)
  double t_max;

  GenerationKernel(const BistableModel& m, double eps, double cstar)
      : model(&m), epsilon(eps), Cstar(cstar), delta(eps * m.G) {
    if (!(cstar > 0)) throw Error(ErrorKind::ConfigInvalid, "C* must be positive");
    if (!(delta < m.delta0)) throw Error(ErrorKind::DeltaTooLarge, "eps G exceeds delta0");
    mu_plus = perturbed_zeros(m, delta).mu_delta;
    mu_minus = perturbed_zeros(m, -delta).mu_delta;
    t_max = generation_time(m, eps);
  }

  PairValue operator()(double u0, double t) const {
    if (t > t_max * (1 + 1e-9) || t < 0)
      throw Error(ErrorKind::ConfigInvalid, "generation pair is defined for 0 <= t <= t^eps");
    const double tau = t / (epsilon * epsilon);
    const double e2 = epsilon * epsilon;
    const double r_plus = Cstar * std::expm1(mu_plus * tau);
    const double r_minus = Cstar * std::expm1(mu_minus * tau);
    return {ode_flow(*model, tau, u0 - e2 * r_minus, -delta).Y,
            ode_flow(*model, tau, u0 + e2 * r_plus, delta).Y};
  }
};

}  // namespace

PairValue generation_pair_at(const BistableModel& model, double u0, double epsilon, double Cstar,
                             double t) {
  return GenerationKernel(model, epsilon, Cstar)(u0, t);
}

std::pair<Field2D, Field2D> build_generation_pair(const BistableModel& model, const Field2D& u0,
                                                  double epsilon, double Cstar, double t,
                                                  int workers) {
  const GenerationKernel kernel(model, epsilon, Cstar);
  Field2D lo(u0.grid, 0.0, t), hi(u0.grid, 0.0, t);
  parallel_rows(static_cast<std::size_t>(u0.grid.ny), workers, [&](std::size_t j) {
    for (int i = 0; i < u0.grid.nx; ++i) {
      const std::size_t k = u0.grid.index(i, static_cast<int>(j));
      const PairValue v = kernel(u0.values[k], t);
      lo.values[k] = v.lower;
      hi.values[k] = v.upper;
    }
  });
  return {std::move(lo), std::move(hi)};
}

PairValue motion_pair_at(const ProfileTable& profile, const MotionConstants& k, double d,
                         double gamma, double epsilon, double t) {
  const double p = motion_p(k, epsilon, t);
  const double q = motion_q(k, epsilon, t);
  const double zp = (d + epsilon * p) / epsilon;
  const double zm = (d - epsilon * p) / epsilon;
  return {profile.eval_U0(zm) + epsilon * gamma * profile.eval_V(zm) - q,
          profile.eval_U0(zp) + epsilon * gamma * profile.eval_V(zp) + q};
}

std::pair<Field2D, Field2D> build_motion_pair(const ProfileTable& profile, const MotionConstants& k,
                                              const SignedDistanceField& dist, double gamma,
                                              double epsilon, double t) {
  Field2D lo(dist.grid, 0.0, t), hi(dist.grid, 0.0, t);
  for (std::size_t n = 0; n < dist.d.size(); ++n) {
    const PairValue v = motion_pair_at(profile, k, dist.d[n], gamma, epsilon, t);
    lo.values[n] = v.lower;
    hi.values[n] = v.upper;
  }
  return {std::move(lo), std::move(hi)};
}

PairEvaluator generation_pair_evaluator(const BistableModel& model, const InitialDataSpec& data,
                                        double Lx, double Ly, double epsilon, double Cstar) {
  const GenerationKernel kernel(model, epsilon, Cstar);
  PairEvaluator pe;
  pe.eval = [kernel, data, Lx, Ly](double x, double y, double t) {
    return kernel(data(x, y, Lx, Ly), t);
  };
  pe.t_begin = 0.0;
  pe.t_end = kernel.t_max;
  return pe;
}

PairEvaluator radial_motion_pair_evaluator(const ProfileTable& profile, const MotionConstants& k,
                                           const RadialSeries& series, double cx, double cy,
                                           double epsilon) {
  PairEvaluator pe;
  auto table = std::make_shared<const ProfileTable>(profile);
  pe.eval = [table, k, series, cx, cy, epsilon](double x, double y, double t) {
    const double R = series.radius_at(t);
    const double d = cutoff_distance(std::hypot(x - cx, y - cy) - R, k.d0);
    const double gamma = series.domain_area - 2 * kPi * R * R;
    return motion_pair_at(*table, k, d, gamma, epsilon, t);
  };
  pe.in_band = [k, series, cx, cy](double x, double y, double t) {
    return std::abs(std::hypot(x - cx, y - cy) - series.radius_at(t)) < k.d0;
  };
  pe.limit_mass = [series](double t) {
    const double R = series.radius_at(t);
    return series.domain_area - 2 * kPi * R * R;
  };
  pe.t_begin = series.t.front();
  pe.t_end = series.t.back();
  return pe;
}

PairEvaluator swapped(const PairEvaluator& pair) {
  PairEvaluator pe = pair;
  pe.eval = [inner = pair.eval](double x, double y, double t) {
    const PairValue v = inner(x, y, t);
    return PairValue{v.upper, v.lower};
  };
  return pe;
}

// ---------------------------------------------------------------------------

FlowScan scan_flow(const BistableModel& model, double tau_max, int n_tau, int n_xi, int n_delta) {
  if (n_tau < 1 || n_xi < 2 || n_delta < 3 || !(tau_max > 0))
    throw Error(ErrorKind::ConfigInvalid, "flow lattice needs n_tau >= 1, n_xi >= 2, n_delta >= 3");
  FlowScan s;
  s.tau_max = tau_max;
  s.bound_Y = 2 * model.C0;
  s.min_Y_xi = std::numeric_limits<double>::infinity();
  std::vector<double> ratio_interior, ratio_boundary;
  for (int id = 0; id < n_delta; ++id) {
    const double delta = model.delta0 * (2.0 * id / (n_delta - 1) - 1.0);
    const double mu_d = perturbed_zeros(model, delta).mu_delta;
    const bool boundary = id == 0 || id == n_delta - 1;
    for (int it = 1; it <= n_tau; ++it) {
      const double tau = tau_max * it / n_tau;
      for (int ix = 0; ix < n_xi; ++ix) {
        const double xi = 2 * model.C0 * (2.0 * ix / (n_xi - 1) - 1.0);
        const FlowValue v = ode_flow(model, tau, xi, delta);
        s.min_Y_xi = std::min(s.min_Y_xi, v.Y_xi);
        s.max_abs_Y = std::max(s.max_abs_Y, std::abs(v.Y));
        const double r = std::abs(v.Y_xixi_over_Y_xi) / std::expm1(mu_d * tau);
        (boundary ? ratio_boundary : ratio_interior).push_back(r);
        ++s.points;
      }
    }
  }
  s.C = *std::max_element(ratio_interior.begin(), ratio_interior.end());
  const auto above = std::count_if(ratio_boundary.begin(), ratio_boundary.end(),
                                   [&](double r) { return r > s.C; });
  s.boundary_violation = static_cast<double>(above) / static_cast<double>(ratio_boundary.size());
  return s;
}

double fit_cstar(const BistableModel& model, const DataBounds& bounds, double flow_C, double epsilon,
                 double safety) {
  const double delta = epsilon * model.G;
  if (!(delta < model.delta0)) throw Error(ErrorKind::DeltaTooLarge, "eps G exceeds delta0");
  const double mu = std::min(perturbed_zeros(model, delta).mu_delta, perturbed_zeros(model, -delta).mu_delta);
  const double need = std::max(bounds.sup_laplacian, flow_C * bounds.sup_grad * bounds.sup_grad);
  return safety * std::max(need, 1e-12) / mu;
}

// ---------------------------------------------------------------------------

nlohmann::json VerificationReport::to_json() const {
  return {{"mode", mode == PairMode::Generation ? "generation" : "motion"},
          {"epsilon", epsilon},
          {"tol_residual", tol_residual},
          {"residual_samples", residual_samples},
          {"residual_ok_fraction", residual_ok_fraction},
          {"worst_residual", worst_residual},
          {"ordering_fraction", ordering_fraction},
          {"ordering_holds", ordering_holds},
          {"mass_ordering_holds", mass_ordering_holds},
          {"initial_holds", initial_holds},
          {"route", route},
          {"limit_mass_used", limit_mass_used},
          {"sandwich_checked", sandwich_checked},
          {"sandwich_nodes", sandwich_nodes},
          {"sandwich_fraction", sandwich_fraction},
          {"sandwich_worst", sandwich_worst}};
}

namespace {

struct NodePair {
  Field2D lower;
  Field2D upper;
};

NodePair pair_on_grid(const PairEvaluator& pair, const Grid2D& grid, double t, int workers) {
  NodePair np{Field2D(grid, 0.0, t), Field2D(grid, 0.0, t)};
  parallel_rows(static_cast<std::size_t>(grid.ny), workers, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < grid.nx; ++i) {
      const PairValue v = pair.eval(grid.x(i), grid.y(j), t);
      np.lower.at(i, j) = v.lower;
      np.upper.at(i, j) = v.upper;
    }
  });
  return np;
}

}  // namespace

VerificationReport verify_pair(const PairEvaluator& pair, const Nonlinearity& nl, double epsilon,
                               const Grid2D& grid, const std::vector<double>& sample_times,
                               PairMode mode, const VerifyOptions& opts,
                               const std::vector<Field2D>* trajectory) {
  VerificationReport rep;
  rep.mode = mode;
  rep.epsilon = epsilon;
  const double hs = opts.fd_space > 0 ? opts.fd_space : epsilon / 32;
  const double ht = opts.fd_time > 0 ? opts.fd_time : epsilon * epsilon / 1000;
  const double h = grid.h();
  rep.tol_residual = opts.C_num * (h * h + opts.grid_dt) / (epsilon * epsilon);
  const double inv_e2 = 1.0 / (epsilon * epsilon);
  const int n = opts.samples_per_axis;
  if (opts.use_limit_mass && !pair.limit_mass)
    throw Error(ErrorKind::ConfigInvalid, "pair carries no limit mass");
  rep.limit_mass_used = opts.use_limit_mass;

  std::size_t ordered = 0, nodes = 0;
  bool mass_ok = true;
  long checks = 0, good = 0;
  double worst = 0.0;
  for (double t_raw : sample_times) {
    const double t_mid = std::clamp(t_raw, pair.t_begin + ht, pair.t_end - ht);
    const NodePair np = pair_on_grid(pair, grid, std::clamp(t_raw, pair.t_begin, pair.t_end), opts.workers);
    for (std::size_t k = 0; k < np.lower.values.size(); ++k)
      ordered += np.lower.values[k] <= np.upper.values[k] ? 1 : 0;
    nodes += np.lower.values.size();
    const double m_lo = mass(np.lower), m_hi = mass(np.upper);
    if (m_lo > m_hi) mass_ok = false;
    std::vector<double> s_set{m_lo, m_hi, 0.5 * (m_lo + m_hi)};
    if (rep.limit_mass_used) s_set = {pair.limit_mass(t_mid)};

    struct RowStats {
      long checks = 0, good = 0;
      double worst = 0.0;
    };
    std::vector<RowStats> rows(static_cast<std::size_t>(n));
    parallel_rows(static_cast<std::size_t>(n), opts.workers, [&](std::size_t jj) {
      RowStats& rs = rows[jj];
      const double y = grid.Ly * (static_cast<double>(jj) + 0.5) / n;
      for (int i = 0; i < n; ++i) {
        const double x = grid.Lx * (i + 0.5) / n;
        if (pair.in_band && !pair.in_band(x, y, t_mid)) continue;
        const PairValue c = pair.eval(x, y, t_mid);
        PairValue lap{0.0, 0.0};
        auto add_axis = [&](double dx, double dy) {
          const PairValue p1 = pair.eval(x + dx, y + dy, t_mid), m1 = pair.eval(x - dx, y - dy, t_mid);
          const PairValue p2 = pair.eval(x + 2 * dx, y + 2 * dy, t_mid),
                          m2 = pair.eval(x - 2 * dx, y - 2 * dy, t_mid);
          auto d2 = [&](double a2, double a1, double a0, double b1, double b2) {
            return (-a2 + 16 * a1 - 30 * a0 + 16 * b1 - b2) / (12 * hs * hs);
          };
          lap.lower += d2(p2.lower, p1.lower, c.lower, m1.lower, m2.lower);
          lap.upper += d2(p2.upper, p1.upper, c.upper, m1.upper, m2.upper);
        };
        add_axis(hs, 0.0);
        add_axis(0.0, hs);
        const PairValue tp = pair.eval(x, y, t_mid + ht), tm = pair.eval(x, y, t_mid - ht);
        double f_max = -std::numeric_limits<double>::infinity();
        double f_min = std::numeric_limits<double>::infinity();
        for (double s : s_set) {
          f_max = std::max(f_max, nl.f(c.upper, epsilon * s));
          f_min = std::min(f_min, nl.f(c.lower, epsilon * s));
        }
        const double L_plus = (tp.upper - tm.upper) / (2 * ht) - lap.upper - inv_e2 * f_max;
        const double L_minus = (tp.lower - tm.lower) / (2 * ht) - lap.lower - inv_e2 * f_min;
        rs.checks += 2;
        rs.good += (L_plus >= -rep.tol_residual ? 1 : 0) + (L_minus <= rep.tol_residual ? 1 : 0);
        rs.worst = std::max({rs.worst, -L_plus, L_minus});
      }
    });
    for (const auto& rs : rows) {
      checks += rs.checks;
      good += rs.good;
      worst = std::max(worst, rs.worst);
    }
  }
  rep.residual_samples = static_cast<int>(checks / 2);
  rep.residual_ok_fraction = checks > 0 ? static_cast<double>(good) / static_cast<double>(checks) : 0.0;
  rep.worst_residual = worst;
  rep.ordering_fraction = nodes > 0 ? static_cast<double>(ordered) / static_cast<double>(nodes) : 0.0;
  rep.ordering_holds = nodes > 0 && ordered == nodes;
  rep.mass_ordering_holds = mass_ok && !sample_times.empty();

  if (trajectory) {
    rep.sandwich_checked = true;
    std::size_t inside = 0, total = 0;
    bool first = true;
    rep.initial_holds = false;
    for (const Field2D& snap : *trajectory) {
      const double tp = snap.time - opts.time_offset;
      if (tp < pair.t_begin - 1e-12 || tp > pair.t_end + 1e-12) continue;
      const NodePair np = pair_on_grid(pair, snap.grid, std::clamp(tp, pair.t_begin, pair.t_end), opts.workers);
      std::size_t in_here = 0;
      for (std::size_t k = 0; k < snap.values.size(); ++k) {
        const double u = snap.values[k];
        const double over = std::max(np.lower.values[k] - u, u - np.upper.values[k]);
        if (over <= opts.sandwich_tol)
          ++in_here;
        else
          rep.sandwich_worst = std::max(rep.sandwich_worst, over);
      }
      if (first) rep.initial_holds = in_here == snap.values.size();
      first = false;
      inside += in_here;
      total += snap.values.size();
    }
    rep.sandwich_nodes = static_cast<int>(total);
    rep.sandwich_fraction = total > 0 ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
  }

  if (rep.ordering_holds)
    rep.route = "ordering";
  else if (rep.initial_holds && rep.mass_ordering_holds)
    rep.route = "relaxed";
  else
    rep.route = "none";
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json StepBoundsReport::to_json() const {
  return {{"checked", checked},
          {"violations", violations},
          {"exempt", exempt},
          {"violation_fraction", violation_fraction},
          {"inconclusive", inconclusive},
          {"reason", reason}};
}

StepBoundsReport step_bounds_check(const Field2D& u, const std::vector<double>& d0_field,
                                   double epsilon, const MotionConstants& k) {
  if (d0_field.size() != u.values.size())
    throw Error(ErrorKind::ConfigInvalid, "distance field and solution differ in size");
  StepBoundsReport rep;
  const double band = k.M1 * epsilon;
  const double h = u.grid.h();
  const double margin = k.sigma * k.beta / 2;
  std::size_t plus_side = 0, minus_side = 0;
  for (double d : d0_field) {
    plus_side += d >= band + h ? 1 : 0;
    minus_side += d <= -band - h ? 1 : 0;
  }
  if (band >= k.d0) {
    rep.inconclusive = true;
    rep.reason = "M1 eps exceeds the tube width d0";
  } else if (plus_side == 0 || minus_side == 0) {
    rep.inconclusive = true;
    rep.reason = "band covers one side of the interface";
  }
  for (std::size_t n = 0; n < d0_field.size(); ++n) {
    const double d = d0_field[n];
    if (std::abs(std::abs(d) - band) < h) {
      ++rep.exempt;
      continue;
    }
    const double H_plus = d > -band ? 1 + margin : -1 + margin;
    const double H_minus = d >= band ? 1 - margin : -1 - margin;
    ++rep.checked;
    if (u.values[n] > H_plus || u.values[n] < H_minus) ++rep.violations;
  }
  rep.violation_fraction = rep.checked > 0 ? static_cast<double>(rep.violations) / rep.checked : 0.0;
  return rep;
}

}  // namespace nlac

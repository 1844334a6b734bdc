#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlac/error.hpp"
#include "nlac/harness.hpp"

namespace nlac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void require_sweep(const std::vector<double>& eps_list) {
  if (eps_list.size() < 3) throw Error(ErrorKind::ConfigInvalid, "an eps sweep needs at least three values");
  for (double e : eps_list)
    if (!(e > 0) || !(e < 1)) throw Error(ErrorKind::ConfigInvalid, "sweep values must lie in (0, 1)");
}

// Constant data carry no interface; the field is built directly so that the
// failure surfaces where the contour is first needed.
Field2D initial_field(const StudySpec& spec, const Grid2D& grid, double a) {
  if (spec.data.shape != InitialShape::Constant) return init_field(spec.data, grid, a);
  Field2D u(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) u.at(i, j) = spec.data(grid.x(i), grid.y(j), spec.Lx, spec.Ly);
  return u;
}

SolverConfig solver_for(const StudySpec& spec, const BistableModel& model, double eps, double t_end) {
  SolverConfig cfg = SolverConfig::for_model(model, eps);
  cfg.scheme = spec.scheme;
  cfg.workers = spec.workers;
  cfg.t_end = t_end;
  return cfg;
}

nlohmann::json hash_input(const char* study, const StudySpec& spec, const std::vector<double>& eps_list) {
  return {{"study", study}, {"spec", spec.canonical()}, {"eps", eps_list}};
}

}  // namespace

double default_motion_horizon(const StudySpec& spec, const ProfileTable& profile) {
  if (spec.data.shape != InitialShape::Circle)
    throw Error(ErrorKind::ConfigInvalid, "the default horizon needs circular data");
  RadialSeries s;
  try {
    s = radial_evolve(spec.data.r0, profile.c0, spec.Lx * spec.Ly, 10.0, 1e-3);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("radial law does not collapse: ") + e.what());
  }
  if (!s.extinct) throw Error(ErrorKind::ConfigInvalid, "radial law does not collapse before t = 10");
  return 0.6 * s.extinction_time;
}

// ---------------------------------------------------------------------------

ExperimentReport generation_study(const StudySpec& spec, const std::vector<double>& eps_list,
                                  double eta) {
  require_sweep(eps_list);
  const Profile1D prof = spec.profile();
  const BistableModel& model = prof.model;
  if (!(eta > 0) || !(eta < model.eta0())) throw Error(ErrorKind::ConfigInvalid, "eta must lie in (0, eta0)");
  const double M1 = band_constant_M1(spec.data, spec.Lx, spec.Ly, model.a, spec.M0);

  ExperimentReport rep;
  rep.study = "generation";
  rep.quantity = "t_star";
  rep.abscissa = "t_eps";
  auto h = hash_input("generation", spec, eps_list);
  h["eta"] = eta;
  rep.config_hash = config_hash(h);
  rep.constants = {{"M0", spec.M0}, {"M1", M1}, {"eta", eta}, {"mu", model.mu}};

  std::vector<double> xs, ys;
  for (double eps : eps_list) {
    const Grid2D grid = spec.grid_for(eps);
    const Field2D u0 = initial_field(spec, grid, model.a);
    const std::vector<double> d0 = initial_distance(u0, model.a, spec.workers);
    const double teps = generation_time(model, eps);
    const double band = M1 * eps;

    std::size_t n_plus = 0, n_minus = 0;
    for (double d : d0) {
      n_plus += d >= band ? 1 : 0;
      n_minus += d <= -band ? 1 : 0;
    }
    SweepRow row{eps, kNaN, {{"t_eps", teps}, {"nodes_plus", double(n_plus)}, {"nodes_minus", double(n_minus)}}};
    if (n_plus == 0 || n_minus == 0) {
      rep.notes.push_back("eps=" + fmt(eps) + ": the band M1 eps leaves one phase without nodes");
      row.extra["ratio"] = kNaN;
      rep.sweep.push_back(row);
      continue;
    }

    double t_star = -1.0;
    const SolverConfig cfg = solver_for(spec, model, eps, 10 * teps);
    run(u0, cfg, [&](const Field2D& u, double) {
      for (std::size_t k = 0; k < d0.size(); ++k) {
        if (d0[k] >= band && std::abs(u.values[k] - model.u_plus) > eta) return true;
        if (d0[k] <= -band && std::abs(u.values[k] - model.u_minus) > eta) return true;
      }
      t_star = u.time;
      return false;
    });
    if (t_star < 0)
      throw Error(ErrorKind::NeverGenerated,
                  "layer not generated within 10 t^eps at eps = " + fmt(eps));
    row.value = t_star;
    row.extra["ratio"] = t_star / teps;
    rep.sweep.push_back(row);
    xs.push_back(teps);
    ys.push_back(t_star);
  }

  rep.sort_sweep();
  rep.fit = fit_loglog(xs, ys);
  for (const auto& row : rep.sweep) rep.check("ratio eps=" + fmt(row.epsilon), row.extra.at("ratio"), 0.3, 3.0);
  rep.check("slope", rep.fit ? rep.fit->slope : kNaN, 0.8, 1.2);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

void width_criteria(ExperimentReport& rep, double lo, double hi) {
  std::vector<double> xs, ys;
  for (const auto& row : rep.sweep) {
    xs.push_back(row.epsilon);
    ys.push_back(row.value);
  }
  rep.fit = fit_loglog(xs, ys);
  rep.check("slope", rep.fit ? rep.fit->slope : kNaN, lo, hi);
}

}  // namespace

ExperimentReport thickness_study(const StudySpec& spec, const std::vector<double>& eps_list,
                                 double eta, double t_probe) {
  require_sweep(eps_list);
  if (!(eta > 0) || !(eta < 1)) throw Error(ErrorKind::ConfigInvalid, "eta must lie in (0, 1)");
  if (!(t_probe >= 0)) throw Error(ErrorKind::ConfigInvalid, "probe time must be nonnegative");
  const Profile1D prof = spec.profile();
  const BistableModel& model = prof.model;

  ExperimentReport rep;
  rep.study = "thickness";
  rep.quantity = "width";
  rep.abscissa = "epsilon";
  auto h = hash_input("thickness", spec, eps_list);
  h["eta"] = eta;
  h["t_probe"] = t_probe;
  rep.config_hash = config_hash(h);
  rep.constants = {{"eta", eta}, {"t_probe", t_probe}};

  for (double eps : eps_list) {
    const Grid2D grid = spec.grid_for(eps);
    const double teps = generation_time(model, eps);
    try {
      const Field2D u0 = initial_field(spec, grid, model.a);
      const Trajectory tr = run(u0, solver_for(spec, model, eps, teps + t_probe));
      const Field2D& u = tr.snapshots.back();
      const WidthEstimate w = transition_width(u, eta, extract_contour(u, model.a, EdgeInterp::Cubic));
      rep.sweep.push_back({eps, w.width, {{"t", u.time}, {"band_area", w.band_area}, {"length", w.length},
                                          {"max_extent", w.max_extent}}});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyContour) throw;
      rep.notes.push_back("EmptyContour at eps=" + fmt(eps) + ": " + e.what());
      break;
    }
  }

  rep.sort_sweep();
  width_criteria(rep, 0.8, 1.2);
  for (std::size_t k = 0; k + 1 < rep.sweep.size(); ++k) {
    const SweepRow& big = rep.sweep[k];
    const SweepRow& small = rep.sweep[k + 1];
    if (std::abs(big.epsilon / small.epsilon - 2) > 1e-9) continue;
    rep.check("halving eps=" + fmt(big.epsilon) + "->" + fmt(small.epsilon), small.value / big.value, 0.4, 0.65);
  }
  return rep;
}

ExperimentReport synthetic_thickness_study(const StudySpec& spec, const std::vector<double>& eps_list,
                                           double eta) {
  require_sweep(eps_list);
  if (!(eta > 0) || !(eta < 1)) throw Error(ErrorKind::ConfigInvalid, "eta must lie in (0, 1)");
  const Profile1D prof = spec.profile();
  const BistableModel& model = prof.model;

  ExperimentReport rep;
  rep.study = "thickness_synthetic";
  rep.quantity = "width";
  rep.abscissa = "epsilon";
  auto h = hash_input("thickness_synthetic", spec, eps_list);
  h["eta"] = eta;
  rep.config_hash = config_hash(h);
  rep.constants = {{"eta", eta}, {"width_theory_per_eps", 2 * prof.table.inverse_U0(1 - eta)}};

  for (double eps : eps_list) {
    const Grid2D grid = spec.grid_for(eps);
    const Field2D u0 = initial_field(spec, grid, model.a);
    const std::vector<double> d = initial_distance(u0, model.a, spec.workers);
    Field2D u(grid);
    for (std::size_t k = 0; k < d.size(); ++k) u.values[k] = prof.table.eval_U0(d[k] / eps);
    const WidthEstimate w = transition_width(u, eta, extract_contour(u, model.a, EdgeInterp::Cubic));
    rep.sweep.push_back({eps, w.width, {{"width_over_eps", w.width / eps}}});
  }
  rep.sort_sweep();
  width_criteria(rep, 0.99, 1.01);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Reference interfaces at the probe times.
struct MotionReference {
  std::vector<Contour> contours;  // empty loops: vanished
  std::vector<double> gamma;
};

MotionReference radial_reference(const StudySpec& spec, double c0, const std::vector<double>& times,
                                 double spacing) {
  const double A = spec.Lx * spec.Ly;
  const double t_end = *std::max_element(times.begin(), times.end());
  const RadialSeries s = radial_evolve(spec.data.r0, c0, A, std::max(t_end, 1e-12), std::max(t_end, 1e-12) / 200);
  MotionReference ref;
  for (double t : times) {
    const double R = s.radius_at(t);
    Contour c;
    if (R > 0) {
      const int n = std::max(64, static_cast<int>(std::ceil(2 * std::numbers::pi * R / spacing)));
      c.loops.push_back(circle_polyline(spec.data.cx, spec.data.cy, R, n));
    }
    ref.contours.push_back(c);
    ref.gamma.push_back(A - 2 * std::numbers::pi * R * R);
  }
  return ref;
}

MotionReference levelset_reference(const StudySpec& spec, const BistableModel& model, double c0,
                                   const std::vector<double>& times) {
  const Grid2D grid{129, 129, spec.Lx, spec.Ly};
  const Field2D u0 = initial_field(spec, grid, model.a);
  LevelSetState state = levelset_from_contour(refine_contour(extract_contour(u0, model.a, EdgeInterp::Cubic), 4),
                                              grid, c0, spec.Lx * spec.Ly, spec.workers);
  std::vector<double> order(times);
  std::sort(order.begin(), order.end());
  MotionReference ref;
  ref.contours.resize(times.size());
  ref.gamma.assign(times.size(), kNaN);
  LevelSetOptions opts;
  opts.workers = spec.workers;
  for (double t : order) {
    Contour c;
    double g = kNaN;
    try {
      if (t > state.time) state = levelset_evolve(state, t, opts);
      c = levelset_contour(state);
      g = levelset_gamma(state);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InterfaceVanished && e.kind() != ErrorKind::EmptyContour) throw;
    }
    for (std::size_t k = 0; k < times.size(); ++k)
      if (times[k] == t) {
        ref.contours[k] = c;
        ref.gamma[k] = g;
      }
    if (c.loops.empty()) break;
  }
  return ref;
}

}  // namespace

ExperimentReport motion_study(const StudySpec& spec, const std::vector<double>& eps_list,
                              const std::vector<double>& times) {
  require_sweep(eps_list);
  if (times.empty()) throw Error(ErrorKind::ConfigInvalid, "motion study needs probe times");
  std::vector<double> probes(times);
  std::sort(probes.begin(), probes.end());
  if (probes.front() < 0) throw Error(ErrorKind::ConfigInvalid, "probe times must be nonnegative");
  if (spec.data.shape == InitialShape::Constant)
    throw Error(ErrorKind::EmptyContour, "constant data have no interface to follow");

  const Profile1D prof = spec.profile();
  const BistableModel& model = prof.model;
  const double c0 = prof.table.c0;
  const double finest = *std::min_element(eps_list.begin(), eps_list.end());
  const MotionReference ref = spec.data.shape == InitialShape::Circle
                                  ? radial_reference(spec, c0, probes, spec.h_ratio * finest / 4)
                                  : levelset_reference(spec, model, c0, probes);

  ExperimentReport rep;
  rep.study = "motion";
  rep.quantity = "hausdorff";
  rep.abscissa = "epsilon";
  auto h = hash_input("motion", spec, eps_list);
  h["times"] = probes;
  rep.config_hash = config_hash(h);
  rep.constants = {{"c0", c0}};

  for (double eps : eps_list) {
    const Grid2D grid = spec.grid_for(eps);
    const double teps = generation_time(model, eps);
    const Field2D u0 = initial_field(spec, grid, model.a);
    std::size_t next = 0;
    const double spacing = grid.h() / 4;
    run(u0, solver_for(spec, model, eps, teps + probes.back()), [&](const Field2D& u, double m) {
      while (next < probes.size() && u.time >= teps + probes[next] - 1e-12) {
        SweepRow row{eps, kNaN, {{"t", probes[next]}, {"gamma_pde", m}, {"gamma_ref", ref.gamma[next]}}};
        if (ref.contours[next].loops.empty()) {
          rep.notes.push_back("reference interface vanished before t=" + fmt(probes[next]));
        } else {
          try {
            const Contour c = extract_contour(u, model.a, EdgeInterp::Cubic);
            row.value = hausdorff(c, ref.contours[next], spacing);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyContour) throw;
            rep.notes.push_back("EmptyContour at eps=" + fmt(eps) + ", t=" + fmt(probes[next]));
          }
        }
        row.extra["D_over_eps"] = row.value / eps;
        rep.sweep.push_back(row);
        ++next;
      }
      return next < probes.size();
    });
  }

  rep.sort_sweep();
  double C_fit = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    std::vector<double> xs, ys;
    for (const auto& row : rep.sweep)
      if (row.extra.at("t") == probes[p]) {
        xs.push_back(row.epsilon);
        ys.push_back(row.value);
        if (std::isfinite(row.value)) C_fit = std::max(C_fit, row.value / row.epsilon);
      }
    const auto fit = fit_loglog(xs, ys);
    rep.constants["slope_t" + std::to_string(p)] = fit ? fit->slope : kNaN;
    rep.constants["t" + std::to_string(p)] = probes[p];
    rep.check("slope t=" + fmt(probes[p]), fit ? fit->slope : kNaN, 0.8,
              std::numeric_limits<double>::infinity());
    if (p + 1 == probes.size()) rep.fit = fit;
  }
  rep.constants["C_fit"] = C_fit;
  return rep;
}

}  // namespace nlac

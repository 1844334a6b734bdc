#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "nlac/snapshot_io.hpp"

namespace nlac::cli {

namespace fs = std::filesystem;

namespace {

const char* shape_name(InitialShape s) {
  switch (s) {
    case InitialShape::Circle: return "circle";
    case InitialShape::Ellipse: return "ellipse";
    case InitialShape::Constant: return "constant";
  }
  return "circle";
}

InitialShape parse_shape(const std::string& s) {
  if (s == "circle") return InitialShape::Circle;
  if (s == "ellipse") return InitialShape::Ellipse;
  if (s == "constant") return InitialShape::Constant;
  throw Error(ErrorKind::ConfigInvalid, "shape must be circle, ellipse or constant, got '" + s + "'");
}

using Setter = std::function<void(RunConfig&, const nlohmann::json&)>;

template <class T, class Member>
Setter field(Member member) {
  return [member](RunConfig& c, const nlohmann::json& v) { c.*member = v.get<T>(); };
}

template <class Member>
Setter data_field(Member member) {
  return [member](RunConfig& c, const nlohmann::json& v) { c.data.*member = v.get<double>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"coefficients", field<std::vector<double>>(&RunConfig::coefficients)},
      {"coupling", field<double>(&RunConfig::coupling)},
      {"nx", field<int>(&RunConfig::nx)},
      {"ny", field<int>(&RunConfig::ny)},
      {"Lx", field<double>(&RunConfig::Lx)},
      {"Ly", field<double>(&RunConfig::Ly)},
      {"epsilon", field<double>(&RunConfig::epsilon)},
      {"dt", field<double>(&RunConfig::dt)},
      {"scheme", field<std::string>(&RunConfig::scheme)},
      {"tEnd", field<double>(&RunConfig::tEnd)},
      {"snapshotEvery", field<int>(&RunConfig::snapshotEvery)},
      {"shape", [](RunConfig& c, const nlohmann::json& v) { c.data.shape = parse_shape(v.get<std::string>()); }},
      {"cx", data_field(&InitialDataSpec::cx)},
      {"cy", data_field(&InitialDataSpec::cy)},
      {"r0", data_field(&InitialDataSpec::r0)},
      {"semiA", data_field(&InitialDataSpec::semi_a)},
      {"semiB", data_field(&InitialDataSpec::semi_b)},
      {"angle", data_field(&InitialDataSpec::angle)},
      {"width", data_field(&InitialDataSpec::width)},
      {"constant", data_field(&InitialDataSpec::constant)},
      {"cutoff", data_field(&InitialDataSpec::cutoff)},
      {"hRatio", field<double>(&RunConfig::hRatio)},
      {"M0", field<double>(&RunConfig::M0)},
      {"study", field<std::string>(&RunConfig::study)},
      {"epsList", field<std::vector<double>>(&RunConfig::epsList)},
      {"eta", field<double>(&RunConfig::eta)},
      {"tProbe", field<double>(&RunConfig::tProbe)},
      {"times", field<std::vector<double>>(&RunConfig::times)},
      {"interfaceMethod", field<std::string>(&RunConfig::interfaceMethod)},
      {"pairMode", field<std::string>(&RunConfig::pairMode)},
      {"negativeControl", field<std::string>(&RunConfig::negativeControl)},
      {"d0", field<double>(&RunConfig::d0)},
      {"etaMotion", field<double>(&RunConfig::etaMotion)},
      {"cstarSafety", field<double>(&RunConfig::cstarSafety)},
      {"samplesPerAxis", field<int>(&RunConfig::samplesPerAxis)},
      {"outDir", field<std::string>(&RunConfig::outDir)},
      {"workers", field<int>(&RunConfig::workers)},
  };
  return table;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::ConfigInvalid, message);
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  require(j.is_object(), "configuration must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    const auto it = setters().find(key);
    require(it != setters().end(), "unknown config key '" + key + "'");
    try {
      it->second(c, value);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ConfigInvalid, "config key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

nlohmann::json RunConfig::canonical() const {
  return {{"coefficients", coefficients},
          {"coupling", coupling},
          {"nx", nx},
          {"ny", ny},
          {"Lx", Lx},
          {"Ly", Ly},
          {"epsilon", epsilon},
          {"dt", dt},
          {"scheme", scheme},
          {"tEnd", tEnd},
          {"snapshotEvery", snapshotEvery},
          {"shape", shape_name(data.shape)},
          {"cx", data.cx},
          {"cy", data.cy},
          {"r0", data.r0},
          {"semiA", data.semi_a},
          {"semiB", data.semi_b},
          {"angle", data.angle},
          {"width", data.width},
          {"constant", data.constant},
          {"cutoff", data.cutoff},
          {"hRatio", hRatio},
          {"M0", M0},
          {"study", study},
          {"epsList", epsList},
          {"eta", eta},
          {"tProbe", tProbe},
          {"times", times},
          {"interfaceMethod", interfaceMethod},
          {"pairMode", pairMode},
          {"negativeControl", negativeControl},
          {"d0", d0},
          {"etaMotion", etaMotion},
          {"cstarSafety", cstarSafety},
          {"samplesPerAxis", samplesPerAxis}};
}

void RunConfig::validate() const {
  require(!coefficients.empty(), "coefficients must not be empty");
  require(Lx > 0 && Ly > 0, "Lx and Ly must be positive");
  require(epsilon > 0 && epsilon < 1, "epsilon must lie in (0, 1)");
  require(dt >= 0, "dt must be non-negative");
  require(tEnd >= 0, "tEnd must be non-negative");
  require(snapshotEvery >= 0, "snapshotEvery must be non-negative");
  require(scheme == "explicit" || scheme == "imex", "scheme must be explicit or imex");
  require((nx == 0) == (ny == 0), "give both nx and ny or neither");
  require(nx == 0 || (nx >= 16 && ny >= 16), "nx and ny must be at least 16");
  require(hRatio > 0, "hRatio must be positive");
  require(M0 > 0, "M0 must be positive");
  require(study == "generation" || study == "thickness" || study == "thickness_synthetic" || study == "motion",
          "study must be generation, thickness, thickness_synthetic or motion");
  require(interfaceMethod == "auto" || interfaceMethod == "radial" || interfaceMethod == "levelset",
          "interfaceMethod must be auto, radial or levelset");
  require(pairMode == "generation" || pairMode == "motion", "pairMode must be generation or motion");
  require(negativeControl == "none" || negativeControl == "swap", "negativeControl must be none or swap");
  require(d0 > 0 && etaMotion > 0 && cstarSafety > 0, "d0, etaMotion and cstarSafety must be positive");
  require(samplesPerAxis >= 2, "samplesPerAxis must be at least 2");
  require(workers >= 1, "workers must be at least 1");
}

StudySpec RunConfig::study_spec() const {
  StudySpec s;
  s.coefficients = coefficients;
  s.coupling = coupling;
  s.Lx = Lx;
  s.Ly = Ly;
  s.data = data;
  s.h_ratio = hRatio;
  s.scheme = scheme == "imex" ? Scheme::Imex : Scheme::Explicit;
  s.M0 = M0;
  s.workers = workers;
  return s;
}

Grid2D RunConfig::grid() const {
  if (nx > 0) {
    Grid2D g{nx, ny, Lx, Ly};
    g.validate();
    return g;
  }
  return study_spec().grid_for(epsilon);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid:
    case ErrorKind::SchemaMismatch:
    case ErrorKind::NotBistable:
    case ErrorKind::Unbalanced:
    case ErrorKind::DeltaTooLarge:
    case ErrorKind::BadInterface:
    case ErrorKind::NoAdmissibleK:
      return 2;
    default:
      return 3;
  }
}

// ---------------------------------------------------------------------------

namespace {

struct Context {
  RunConfig config;
  fs::path out_dir;
  std::string hash;
  std::ostream* out;
};

fs::path output(const Context& ctx, const std::string& name) { return ctx.out_dir / name; }

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::ConfigInvalid, "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

template <class Writer>
void write_text(const fs::path& path, Writer&& writer) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::ConfigInvalid, "cannot write " + path.string());
  writer(f);
}

Profile1D profile_for(const RunConfig& c) { return c.study_spec().profile(); }

SolverConfig solver_for(const RunConfig& c, const BistableModel& model, double eps) {
  SolverConfig cfg = SolverConfig::for_model(model, eps);
  cfg.dt = c.dt;
  cfg.scheme = c.scheme == "imex" ? Scheme::Imex : Scheme::Explicit;
  cfg.t_end = c.tEnd;
  cfg.snapshot_every = c.snapshotEvery;
  cfg.workers = c.workers;
  return cfg;
}

// Initial field on the run grid; constant data are sampled directly because
// they carry no interface to validate.
Field2D initial_field(const RunConfig& c, const Grid2D& g, double a) {
  if (c.data.shape != InitialShape::Constant) return init_field(c.data, g, a);
  Field2D u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.at(i, j) = c.data(g.x(i), g.y(j), c.Lx, c.Ly);
  return u;
}

int cmd_profile(const Context& ctx) {
  const Profile1D p = profile_for(ctx.config);
  const std::string stem = "profile_" + ctx.hash;
  write_text(output(ctx, stem + ".csv"), [&](std::ostream& f) { write_profile_csv(f, p.table); });
  const nlohmann::json summary = {{"config_hash", ctx.hash},
                                  {"a", p.model.a},
                                  {"mu", p.model.mu},
                                  {"c0_wave", p.table.c0},
                                  {"c0_intrinsic", intrinsic_c0(p.model)},
                                  {"lambda", p.table.lambda},
                                  {"M", p.table.M_bound},
                                  {"fredholm_residual", p.table.fredholm_residual}};
  write_json(output(ctx, stem + ".json"), summary);
  *ctx.out << "profile: c0 = " << p.table.c0 << ", written " << stem << ".{csv,json}\n";
  return 0;
}

int cmd_simulate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Profile1D p = profile_for(c);
  const Grid2D g = c.grid();
  const Trajectory tr = run(initial_field(c, g, p.model.a), solver_for(c, p.model, c.epsilon));

  nlohmann::json index = {{"config_hash", ctx.hash}, {"epsilon", c.epsilon}, {"snapshots", nlohmann::json::array()}};
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    std::ostringstream stem;
    stem << "simulate_" << ctx.hash << "_s" << std::setw(4) << std::setfill('0') << k;
    write_snapshot(output(ctx, stem.str()), tr.snapshots[k], c.epsilon);
    index["snapshots"].push_back({{"stem", stem.str()}, {"time", tr.snapshots[k].time}});
  }
  write_text(output(ctx, "simulate_" + ctx.hash + "_mass.csv"),
             [&](std::ostream& f) { write_mass_csv(f, tr.mass_series); });
  try {
    const Contour contour = extract_contour(tr.snapshots.back(), p.model.a, EdgeInterp::Cubic);
    write_text(output(ctx, "simulate_" + ctx.hash + "_contour.csv"),
               [&](std::ostream& f) { write_contour_csv(f, contour); });
    index["final_contour"] = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyContour) throw;
    index["final_contour"] = false;
  }
  index["final_time"] = tr.snapshots.back().time;
  index["final_mass"] = tr.mass_series.back().second;
  write_json(output(ctx, "simulate_" + ctx.hash + ".json"), index);
  *ctx.out << "simulate: " << tr.snapshots.size() << " snapshot(s) up to t = " << tr.snapshots.back().time << '\n';
  return 0;
}

int cmd_interface(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Profile1D p = profile_for(c);
  const double c0 = p.table.c0;
  const double area = c.Lx * c.Ly;
  std::string method = c.interfaceMethod;
  if (method == "auto") method = c.data.shape == InitialShape::Circle ? "radial" : "levelset";
  const std::string stem = "interface_" + ctx.hash;
  nlohmann::json summary = {{"config_hash", ctx.hash}, {"method", method}, {"c0", c0}};

  if (method == "radial") {
    require(c.data.shape == InitialShape::Circle, "the radial law needs circular data");
    const double t_end = c.tEnd;
    const RadialSeries s = radial_evolve(c.data.r0, c0, area, t_end, t_end > 0 ? t_end / 200 : 1.0);
    write_text(output(ctx, stem + "_radial.csv"), [&](std::ostream& f) { write_radial_csv(f, s); });
    summary["extinct"] = s.extinct;
    summary["extinction_time"] = s.extinct ? nlohmann::json(s.extinction_time) : nlohmann::json(nullptr);
    summary["final_radius"] = s.R.back();
    summary["steady_states"] = nlohmann::json::array();
    for (const auto& st : radial_steady_states(c0, area))
      summary["steady_states"].push_back({{"R", st.R}, {"stable", st.stable}});
  } else {
    const Grid2D g = c.nx > 0 ? c.grid() : Grid2D{129, 129, c.Lx, c.Ly};
    const Field2D u0 = initial_field(c, g, p.model.a);
    const LevelSetState start = levelset_from_contour(
        refine_contour(extract_contour(u0, p.model.a, EdgeInterp::Cubic), 4), g, c0, area, c.workers);
    std::vector<std::pair<double, double>> gamma{{start.time, levelset_gamma(start)}};
    LevelSetOptions opts;
    opts.workers = c.workers;
    long steps = 0;
    const int every = c.snapshotEvery > 0 ? c.snapshotEvery : 50;
    const LevelSetState end = c.tEnd > 0 ? levelset_evolve(start, c.tEnd, opts, [&](const LevelSetState& s) {
      if (++steps % every == 0) gamma.emplace_back(s.time, levelset_gamma(s));
      return true;
    })
                                         : start;
    if (gamma.back().first != end.time) gamma.emplace_back(end.time, levelset_gamma(end));
    write_text(output(ctx, stem + "_gamma.csv"), [&](std::ostream& f) {
      f << std::setprecision(17) << "t,gamma\n";
      for (const auto& [t, v] : gamma) f << t << ',' << v << '\n';
    });
    write_text(output(ctx, stem + "_contour.csv"),
               [&](std::ostream& f) { write_contour_csv(f, levelset_contour(end)); });
    summary["final_time"] = end.time;
    summary["final_gamma"] = gamma.back().second;
  }
  write_json(output(ctx, stem + ".json"), summary);
  *ctx.out << "interface: " << method << " reference written to " << stem << "*\n";
  return 0;
}

void write_report(const Context& ctx, const std::string& stem, const ExperimentReport& rep) {
  nlohmann::json j = rep.to_json();
  j["run_hash"] = ctx.hash;
  write_json(output(ctx, stem + ".json"), j);
  write_text(output(ctx, stem + ".csv"), [&](std::ostream& f) { rep.write_csv(f); });
}

int cmd_study(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const StudySpec spec = c.study_spec();
  ExperimentReport rep;
  if (c.study == "generation") {
    rep = generation_study(spec, c.epsList, c.eta);
  } else if (c.study == "thickness_synthetic") {
    rep = synthetic_thickness_study(spec, c.epsList, c.eta);
  } else {
    const Profile1D p = spec.profile();
    const bool need_horizon = c.study == "motion" ? c.times.empty() : c.tProbe < 0;
    const double T = need_horizon ? default_motion_horizon(spec, p.table) : 0.0;
    if (c.study == "thickness") {
      rep = thickness_study(spec, c.epsList, c.eta, c.tProbe < 0 ? T / 2 : c.tProbe);
    } else {
      rep = motion_study(spec, c.epsList, c.times.empty() ? std::vector<double>{T / 4, T / 2} : c.times);
    }
  }
  const std::string stem = "study_" + c.study + "_" + ctx.hash;
  write_report(ctx, stem, rep);
  *ctx.out << "study " << c.study << ": " << (rep.passed() ? "pass" : "FAIL") << " (" << stem << ".json)\n";
  for (const auto& cr : rep.criteria)
    *ctx.out << "  " << (cr.pass ? "pass" : "FAIL") << "  " << cr.name << " = " << cr.value << '\n';
  return rep.passed() ? 0 : 1;
}

int cmd_verify(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const StudySpec spec = c.study_spec();
  const Profile1D p = spec.profile();
  const BistableModel& m = p.model;
  const Nonlinearity nl = spec.nonlinearity();
  const double eps = c.epsilon;
  const Grid2D g = c.grid();
  const Field2D u0 = initial_field(c, g, m.a);
  const double te = generation_time(m, eps);

  ExperimentReport rep;
  rep.study = "verify_" + c.pairMode;
  rep.quantity = "sandwich_fraction";
  rep.abscissa = "epsilon";
  rep.config_hash = ctx.hash;
  nlohmann::json extra;

  PairEvaluator pair;
  SolverConfig cfg = solver_for(c, m, eps);
  VerifyOptions vo;
  vo.samples_per_axis = c.samplesPerAxis;
  vo.workers = c.workers;
  vo.grid_dt = cfg.time_step(g);
  std::vector<double> times;
  double span = 0.0;

  if (c.pairMode == "generation") {
    const FlowScan flow = scan_flow(m, std::abs(std::log(eps)) / m.mu);
    const double cstar = fit_cstar(m, measure_bounds(u0), flow.C, eps, c.cstarSafety);
    pair = generation_pair_evaluator(m, c.data, c.Lx, c.Ly, eps, cstar);
    span = te;
    cfg.t_end = te;
    rep.constants = {{"Cstar", cstar}, {"flow_C", flow.C}, {"t_eps", te}};
  } else {
    require(c.data.shape == InitialShape::Circle, "motion pairs follow the radial law and need circular data");
    const double T = c.tEnd > 0 ? c.tEnd : default_motion_horizon(spec, p.table);
    const double M1 = band_constant_M1(c.data, c.Lx, c.Ly, m.a, c.M0);
    const MotionConstants k = compute_motion_constants(m, p.table, T, c.etaMotion, M1, c.d0);
    const RadialSeries rs = radial_evolve(c.data.r0, p.table.c0, c.Lx * c.Ly, T, T / 400);
    pair = radial_motion_pair_evaluator(p.table, k, rs, c.data.cx, c.data.cy, eps);
    span = pair.t_end;
    cfg.t_end = te + span;
    vo.time_offset = te;
    extra["motion_constants"] = k.to_json();
    rep.constants = {{"T", T}, {"t_eps", te}, {"K", k.K}, {"L", k.L}, {"eps0", k.eps0}};
  }
  for (int n = 0; n <= 4; ++n) times.push_back(pair.t_begin + span * n / 4);
  if (cfg.snapshot_every == 0)
    cfg.snapshot_every = std::max(1, static_cast<int>(std::ceil(cfg.t_end / cfg.time_step(g) / 8)));
  if (c.negativeControl == "swap") pair = swapped(pair);

  const Trajectory tr = run(u0, cfg);
  const VerificationReport vr = verify_pair(pair, nl, eps, g, times,
                                            c.pairMode == "generation" ? PairMode::Generation : PairMode::Motion,
                                            vo, &tr.snapshots);
  extra["verification"] = vr.to_json();
  rep.sweep.push_back({eps, vr.sandwich_fraction, {{"ordering_fraction", vr.ordering_fraction},
                                                   {"residual_ok_fraction", vr.residual_ok_fraction}}});
  rep.check("comparison route available", vr.route == "none" ? 0.0 : 1.0, 1.0, 1.0);
  if (c.pairMode == "generation") {
    rep.check("sandwich fraction", vr.sandwich_fraction, 1.0, 1.0);
    rep.check("residual sign fraction", vr.residual_ok_fraction, 0.99, 1.0);
  } else {
    rep.check("sandwich fraction", vr.sandwich_fraction, 0.999, 1.0);
    if (pair.limit_mass) {
      VerifyOptions local = vo;
      local.use_limit_mass = true;
      const VerificationReport lr = verify_pair(pair, nl, eps, g, times, PairMode::Motion, local);
      extra["limit_mass_residual"] = lr.to_json();
    }
  }

  const std::string stem = "verify_" + c.pairMode + "_" + ctx.hash;
  nlohmann::json j = rep.to_json();
  j.update(extra);
  write_json(output(ctx, stem + ".json"), j);
  *ctx.out << "verify " << c.pairMode << (c.negativeControl == "swap" ? " (swapped)" : "") << ": "
           << (rep.passed() ? "pass" : "FAIL") << ", route " << vr.route << ", sandwich "
           << vr.sandwich_fraction << ", residual signs " << vr.residual_ok_fraction << '\n';
  return rep.passed() ? 0 : 1;
}

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::ConfigInvalid, "cannot open config " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("malformed config: ") + e.what());
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlocal Allen-Cahn sharp-interface toolkit"};
  app.fallthrough();
  std::string config_path, out_dir;
  int workers = 0;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory (overrides outDir)");
  app.add_option("--workers", workers, "worker threads (overrides workers)")->check(CLI::PositiveNumber);
  app.require_subcommand(1, 1);

  using Command = int (*)(const Context&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"profile", "standing wave, corrector and model constants", cmd_profile},
      {"simulate", "integrate the PDE and write snapshots", cmd_simulate},
      {"interface", "evolve the limit interface law", cmd_interface},
      {"study", "run an epsilon sweep and write its report", cmd_study},
      {"verify", "check a sub/super-solution pair against a PDE run", cmd_verify},
  };
  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, help, fn] : commands) dispatch[app.add_subcommand(name, help)] = fn;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    nlohmann::json j = load_config(config_path);
    Context ctx{RunConfig::from_json(j), {}, {}, &out};
    if (!out_dir.empty()) ctx.config.outDir = out_dir;
    if (workers > 0) ctx.config.workers = workers;
    ctx.config.validate();
    CLI::App* sub = app.get_subcommands().front();
    ctx.hash = config_hash({{"command", sub->get_name()}, {"config", ctx.config.canonical()}});
    ctx.out_dir = ctx.config.outDir;
    fs::create_directories(ctx.out_dir);
    return dispatch.at(sub)(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace nlac::cli

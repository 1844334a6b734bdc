#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlac/error.hpp"
#include "nlac/harness.hpp"

using namespace nlac;

namespace {

const Profile1D& cubic_profile() {
  static const Profile1D p = StudySpec{}.profile();
  return p;
}

// Closed-form inverse of U0(z) = tanh(z / sqrt 2).
double tanh_inverse(double level) { return std::sqrt(2.0) * std::atanh(level); }

}  // namespace

TEST_CASE("motion constants") {
  const auto& P = cubic_profile();
  const double eta = 0.3, M1 = 3.0, d0 = 0.1, T = 0.05;
  const MotionConstants k = compute_motion_constants(P.model, P.table, T, eta, M1, d0);

  CHECK(k.beta == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(k.sigma <= 0.8);
  CHECK(k.sigma <= k.sigma0);
  CHECK(k.sigma <= k.sigma2);
  CHECK(k.sigma * k.beta <= eta / 3 + 1e-15);

  const double level = 1 - k.sigma * k.beta / 3;
  CHECK(k.K == doctest::Approx(M1 + tanh_inverse(level)).epsilon(1e-6));
  CHECK(P.table.eval_U0(k.K - M1) >= level - 1e-12);
  CHECK(P.table.eval_U0(M1 - k.K) <= -level + 1e-12);

  CHECK(std::exp(k.L * T) + k.K <= d0 / (2 * k.eps0) * (1 + 1e-12));
  CHECK(k.L == doctest::Approx(std::log(d0 / (4 * k.eps0)) / T).epsilon(1e-14));
  CHECK(k.eps0 * k.eps0 * k.L * std::exp(k.L * T) <= 1.0);

  CHECK_THROWS_AS(compute_motion_constants(P.model, P.table, T, P.model.eta0(), M1, d0), Error);
  CHECK_THROWS_AS(compute_motion_constants(P.model, P.table, -1.0, eta, M1, d0), Error);

  SUBCASE("q is sigma eps^2 p'") {
    double worst = 0.0;
    for (double eps : {0.08, 0.02, 0.005})
      for (int n = 0; n <= 200; ++n) {
        const double t = T * n / 200;
        worst = std::max(worst, std::abs(motion_q(k, eps, t) - k.sigma * eps * eps * motion_dp(k, eps, t)));
      }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("motion pair") {
  const auto& P = cubic_profile();
  const double T = 0.05;

  SUBCASE("sharp limit away from the interface") {
    const MotionConstants k = compute_motion_constants(P.model, P.table, T, 0.3, 1.0, 0.1);
    const double eps = 0.005;
    for (double t : {0.0, T / 4}) {
      double worst = 0.0;
      for (double d = -0.1; d <= 0.1; d += 1e-4) {
        if (std::abs(d) < 10 * eps) continue;
        const PairValue v = motion_pair_at(P.table, k, d, 0.5, eps, t);
        const double target = d > 0 ? 1.0 : -1.0;
        worst = std::max({worst, std::abs(v.lower - target), std::abs(v.upper - target)});
      }
      CHECK(worst <= 0.05);
    }
  }

  SUBCASE("ordered for admissible constants") {
    const MotionConstants k = compute_motion_constants(P.model, P.table, T, 0.3, 3.0, 0.1);
    for (double eps : {0.08, 0.02})
      for (double t : {0.0, T / 2, T})
        for (double d = -0.2; d <= 0.2; d += 1e-3) {
          const PairValue v = motion_pair_at(P.table, k, d, 0.3, eps, t);
          REQUIRE(v.lower <= v.upper);
        }
  }
}

TEST_CASE("generation pair") {
  const auto& P = cubic_profile();
  const BistableModel& m = P.model;
  const double eps = 0.04;
  const double te = generation_time(m, eps);

  for (double u0 : {-2.0, -0.7, -0.01, 0.0, 0.3, 1.0, 1.9}) {
    const PairValue start = generation_pair_at(m, u0, eps, 50.0, 0.0);
    CHECK(start.lower == u0);
    CHECK(start.upper == u0);
    const PairValue end = generation_pair_at(m, u0, eps, 50.0, te);
    CHECK(end.lower <= end.upper);
  }
  CHECK_THROWS_AS(generation_pair_at(m, 0.1, eps, 50.0, 1.5 * te), Error);
  try {
    generation_pair_at(m, 0.1, 0.1, 50.0, 0.0);
    FAIL("expected DeltaTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DeltaTooLarge);
  }

  SUBCASE("field version agrees with the pointwise one") {
    const StudySpec spec;
    const Grid2D g = spec.grid_for(0.08);
    const Field2D u0 = init_field(spec.data, g, m.a);
    const auto [lo, hi] = build_generation_pair(m, u0, eps, 50.0, te / 2, 1);
    for (std::size_t k = 0; k < u0.values.size(); k += 97) {
      const PairValue v = generation_pair_at(m, u0.values[k], eps, 50.0, te / 2);
      CHECK(lo.values[k] == v.lower);
      CHECK(hi.values[k] == v.upper);
    }
  }
}

TEST_CASE("flow scan") {
  const auto& m = cubic_profile().model;
  const FlowScan s = scan_flow(m, std::abs(std::log(0.04)) / m.mu);
  CHECK(s.points == 2000);
  CHECK(s.min_Y_xi > 0);
  CHECK(s.max_abs_Y <= s.bound_Y);
  CHECK(std::isfinite(s.C));
  CHECK(s.boundary_violation <= 0.05);
}

TEST_CASE("pair verification") {
  const auto& P = cubic_profile();
  const StudySpec spec;
  const Nonlinearity nl = spec.nonlinearity();

  SUBCASE("generation pair residuals and negative control") {
    const double eps = 0.04;
    const Grid2D g = spec.grid_for(0.08);
    const Field2D u0 = init_field(spec.data, g, P.model.a);
    const FlowScan fs = scan_flow(P.model, std::abs(std::log(eps)) / P.model.mu);
    const double cstar = fit_cstar(P.model, measure_bounds(init_field(spec.data, spec.grid_for(eps), P.model.a)),
                                   fs.C, eps);
    const PairEvaluator pe = generation_pair_evaluator(P.model, spec.data, 1, 1, eps, cstar);
    const double te = pe.t_end;
    VerifyOptions vo;
    vo.samples_per_axis = 8;
    vo.grid_dt = 5e-6;
    const auto ok = verify_pair(pe, nl, eps, g, {te / 3, te}, PairMode::Generation, vo);
    CHECK(ok.residual_ok_fraction == 1.0);
    CHECK(ok.ordering_holds);
    CHECK(ok.route == "ordering");

    const auto bad = verify_pair(swapped(pe), nl, eps, g, {te / 3, te}, PairMode::Generation, vo);
    CHECK_FALSE(bad.ordering_holds);
    CHECK(bad.route == "none");
    CHECK(bad.residual_ok_fraction < 0.5);
  }

  SUBCASE("motion pair around the radial reference") {
    const double eps = 0.04;
    const double T = default_motion_horizon(spec, P.table);
    const double M1 = band_constant_M1(spec.data, 1, 1, P.model.a, spec.M0);
    const MotionConstants k = compute_motion_constants(P.model, P.table, T, 0.3, M1, 0.1);
    const RadialSeries rs = radial_evolve(spec.data.r0, P.table.c0, 1.0, T, T / 400);
    const PairEvaluator pe = radial_motion_pair_evaluator(P.table, k, rs, 0.5, 0.5, eps);

    const Grid2D g = spec.grid_for(eps);
    SolverConfig cfg = SolverConfig::for_model(P.model, eps);
    const double te = generation_time(P.model, eps);
    cfg.t_end = te + T;
    cfg.snapshot_every = static_cast<int>(std::ceil(T / 4 / cfg.time_step(g)));
    const Trajectory tr = run(init_field(spec.data, g, P.model.a), cfg);

    VerifyOptions vo;
    vo.grid_dt = cfg.time_step(g);
    vo.time_offset = te;
    const std::vector<double> times{0.0, T / 4, T / 2, T};
    const auto rep = verify_pair(pe, nl, eps, g, times, PairMode::Motion, vo, &tr.snapshots);
    CHECK(rep.sandwich_checked);
    CHECK(rep.sandwich_fraction >= 0.999);
    CHECK(rep.ordering_holds);
    CHECK(rep.mass_ordering_holds);

    vo.use_limit_mass = true;
    const auto local = verify_pair(pe, nl, eps, g, times, PairMode::Motion, vo);
    CHECK(local.limit_mass_used);
    CHECK(local.residual_ok_fraction >= 0.99);

    vo.use_limit_mass = false;
    const auto bad = verify_pair(swapped(pe), nl, eps, g, times, PairMode::Motion, vo, &tr.snapshots);
    CHECK_FALSE(bad.ordering_holds);
    CHECK(bad.sandwich_fraction < 0.5);
  }

  SUBCASE("limit mass needs a pair that carries it") {
    const PairEvaluator pe = generation_pair_evaluator(P.model, spec.data, 1, 1, 0.04, 10.0);
    VerifyOptions vo;
    vo.use_limit_mass = true;
    CHECK_THROWS_AS(verify_pair(pe, nl, 0.04, spec.grid_for(0.08), {0.0}, PairMode::Generation, vo), Error);
  }
}

TEST_CASE("step bounds at the end of generation") {
  StudySpec spec;
  spec.M0 = 20;
  const auto P = spec.profile();
  const double M1 = band_constant_M1(spec.data, 1, 1, P.model.a, spec.M0);
  const MotionConstants k = compute_motion_constants(P.model, P.table, 0.03, 0.3, M1, 0.2);

  const double eps = 0.02;
  const Grid2D g = spec.grid_for(eps);
  const Field2D u0 = init_field(spec.data, g, P.model.a);
  const std::vector<double> d0 = initial_distance(u0, P.model.a);
  SolverConfig cfg = SolverConfig::for_model(P.model, eps);
  cfg.t_end = generation_time(P.model, eps);
  const Field2D u = run(u0, cfg).snapshots.back();

  const StepBoundsReport ok = step_bounds_check(u, d0, eps, k);
  CHECK_FALSE(ok.inconclusive);
  CHECK(ok.checked > 0);
  CHECK(ok.exempt > 0);
  CHECK(ok.violations == 0);

  Field2D scaled = u;
  for (double& v : scaled.values) v *= 1.5;
  const StepBoundsReport bad = step_bounds_check(scaled, d0, eps, k);
  CHECK(bad.violation_fraction > 0.1);

  const Grid2D coarse = spec.grid_for(0.2);
  const Field2D c0 = init_field(spec.data, coarse, P.model.a);
  const StepBoundsReport wide = step_bounds_check(c0, initial_distance(c0, P.model.a), 0.2, k);
  CHECK(wide.inconclusive);
  CHECK_FALSE(wide.reason.empty());
}

TEST_CASE("studies") {
  const std::vector<double> sweep{0.08, 0.07, 0.06};

  SUBCASE("synthetic thickness has slope one") {
    const ExperimentReport r = synthetic_thickness_study(StudySpec{}, {0.08, 0.04, 0.02}, 0.2);
    REQUIRE(r.fit);
    CHECK(r.fit->slope == doctest::Approx(1.0).epsilon(0.01));
    CHECK(r.passed());
  }

  SUBCASE("constant data abort the thickness study") {
    StudySpec spec;
    spec.data.shape = InitialShape::Constant;
    spec.data.constant = 0.5;
    const ExperimentReport r = thickness_study(spec, sweep, 0.2, 0.0);
    REQUIRE_FALSE(r.notes.empty());
    CHECK(r.notes.front().find("EmptyContour") != std::string::npos);
    CHECK(r.sweep.empty());
    CHECK_FALSE(r.passed());
  }

  SUBCASE("short sweeps are rejected") {
    try {
      generation_study(StudySpec{}, {0.08, 0.04}, 0.2);
      FAIL("expected ConfigInvalid");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigInvalid);
    }
  }

  SUBCASE("a looser target is reached sooner") {
    const ExperimentReport tight = generation_study(StudySpec{}, sweep, 0.15);
    const ExperimentReport loose = generation_study(StudySpec{}, sweep, 0.3);
    REQUIRE(tight.sweep.size() == loose.sweep.size());
    for (std::size_t k = 0; k < tight.sweep.size(); ++k) CHECK(loose.sweep[k].value <= tight.sweep[k].value);
  }

  SUBCASE("generation time is resolved") {
    StudySpec fine;
    fine.h_ratio = 0.125;
    const ExperimentReport a = generation_study(StudySpec{}, sweep, 0.2);
    const ExperimentReport b = generation_study(fine, sweep, 0.2);
    for (std::size_t k = 0; k < a.sweep.size(); ++k)
      CHECK(std::abs(b.sweep[k].value - a.sweep[k].value) < 0.1 * a.sweep[k].value);
  }

  SUBCASE("worker count does not change reports") {
    StudySpec one, two;
    two.workers = 2;
    CHECK(generation_study(one, sweep, 0.2).to_json().dump() == generation_study(two, sweep, 0.2).to_json().dump());
    CHECK(thickness_study(one, sweep, 0.2, 0.005).to_json().dump() ==
          thickness_study(two, sweep, 0.2, 0.005).to_json().dump());
  }

  SUBCASE("sweep rows are sorted and hashed") {
    const ExperimentReport r = generation_study(StudySpec{}, {0.06, 0.08, 0.07}, 0.2);
    CHECK(r.sweep.front().epsilon == 0.08);
    CHECK(r.sweep.back().epsilon == 0.06);
    CHECK(r.config_hash.size() == 16);
    CHECK(r.constants.at("M1") == doctest::Approx(3.0).epsilon(1e-6));
  }
}

TEST_CASE("motion horizon") {
  const auto& P = cubic_profile();
  const double T = default_motion_horizon(StudySpec{}, P.table);
  const RadialSeries s = radial_evolve(0.35, P.table.c0, 1.0, 1.0, 1e-4);
  REQUIRE(s.extinct);
  CHECK(T == doctest::Approx(0.6 * s.extinction_time).epsilon(1e-3));

  StudySpec ellipse;
  ellipse.data.shape = InitialShape::Ellipse;
  CHECK_THROWS_AS(default_motion_horizon(ellipse, P.table), Error);
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlac/error.hpp"
#include "nlac/field_solver.hpp"

using namespace nlac;

namespace {

SolverConfig heat_config(double epsilon) {
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  cfg.reaction = Nonlinearity::polynomial({0.0}, 0.0);
  cfg.F1 = 0.0;
  return cfg;
}

Field2D cosine_field(const Grid2D& g) {
  Field2D u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.at(i, j) = std::cos(std::numbers::pi * g.x(i));
  return u;
}

}  // namespace

TEST_CASE("mass of simple fields") {
  const Grid2D g{33, 33, 1.0, 1.0};
  CHECK(mass(Field2D(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));

  Field2D odd(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      odd.at(i, j) = std::sin(7.0 * (g.x(i) - 0.5)) + std::pow(g.y(j) - 0.5, 3);
  CHECK(std::abs(mass(odd)) <= 1e-12);
}

TEST_CASE("init_field") {
  const Grid2D g = Grid2D::with_spacing(0.01);
  InitialDataSpec spec;

  SUBCASE("circle crosses zero at r0 on the centre line") {
    const Field2D u = init_field(spec, g);
    const int j = (g.ny - 1) / 2;
    double crossing = -1;
    for (int i = (g.nx - 1) / 2; i + 1 < g.nx; ++i) {
      const double a = u.at(i, j), b = u.at(i + 1, j);
      if (a < 0 && b >= 0) crossing = g.x(i) + g.hx() * a / (a - b);
    }
    CHECK(std::abs(crossing - 0.5 - spec.r0) <= g.h());
    CHECK(u.at(j, j) < 0);
    CHECK(u.at(0, 0) > 0);
  }

  SUBCASE("zero normal derivative on the walls") {
    // Evaluate the analytic data just across each wall and compare with its mirror.
    const double s = 1e-7;
    for (int k = 0; k <= 20; ++k) {
      const double t = 0.05 * k;
      CHECK(spec(-s, t, 1, 1) == doctest::Approx(spec(s, t, 1, 1)).epsilon(1e-15));
      CHECK(spec(1 + s, t, 1, 1) == doctest::Approx(spec(1 - s, t, 1, 1)).epsilon(1e-15));
      CHECK(spec(t, -s, 1, 1) == doctest::Approx(spec(t, s, 1, 1)).epsilon(1e-15));
      CHECK(spec(t, 1 + s, 1, 1) == doctest::Approx(spec(t, 1 - s, 1, 1)).epsilon(1e-15));
    }
    const double d = 1e-4;
    for (int k = 0; k <= 20; ++k) {
      const double t = 0.05 * k;
      const double one_sided = (spec(d, t, 1, 1) - spec(0, t, 1, 1)) / d;
      CHECK(std::abs(one_sided) <= 1e-6);
    }
  }

  SUBCASE("constant data has no interface") {
    InitialDataSpec flat;
    flat.shape = InitialShape::Constant;
    flat.constant = 0.5;
    CHECK_THROWS_AS(init_field(flat, g), Error);
    try {
      init_field(flat, g);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BadInterface);
    }
  }

  SUBCASE("curve touching the wall is rejected") {
    InitialDataSpec big;
    big.r0 = 0.6;
    try {
      init_field(big, g);
      FAIL("expected BadInterface");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BadInterface);
    }
  }

  SUBCASE("data bounds") {
    const DataBounds b = measure_bounds(init_field(spec, g));
    CHECK(b.sup_u <= 1.0);
    CHECK(b.sup_grad == doctest::Approx(1.0 / spec.width).epsilon(0.05));
    CHECK(b.C0 >= b.sup_u + b.sup_grad);
  }
}

TEST_CASE("heat step fixed point and Neumann eigenfunction") {
  const Grid2D g{41, 41, 1.0, 1.0};
  const auto cfg = heat_config(0.1);

  const Field2D c(g, 0.3);
  CHECK(max_abs_difference(step(c, cfg), c) == 0.0);

  const double dt = cfg.time_step(g);
  const Field2D u0 = cosine_field(g);
  const Field2D u1 = step(u0, cfg, dt);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double h = g.h();
  const double expected = std::exp(-pi2 * dt);
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(u0.at(i, 5)) < 0.1) continue;
    const double ratio = u1.at(i, 5) / u0.at(i, 5);
    CHECK(std::abs(ratio - expected) <= pi2 * pi2 * (dt * dt + h * h * dt));
  }

  auto imex = cfg;
  imex.scheme = Scheme::Imex;
  const Field2D v1 = step(u0, imex, dt);
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(u0.at(i, 5)) < 0.1) continue;
    CHECK(std::abs(v1.at(i, 5) / u0.at(i, 5) - expected) <= pi2 * pi2 * (dt * dt + h * h * dt));
  }
}

TEST_CASE("mass conservation without reaction") {
  const Grid2D g{41, 41, 1.0, 1.0};
  auto cfg = heat_config(0.1);
  InitialDataSpec spec;
  spec.width = 0.1;
  const Field2D u0 = init_field(spec, g);
  for (Scheme s : {Scheme::Explicit, Scheme::Imex}) {
    cfg.scheme = s;
    cfg.t_end = 0.05;
    const auto traj = run(u0, cfg);
    const double m0 = traj.mass_series.front().second;
    const double m1 = traj.mass_series.back().second;
    CHECK(std::abs(m1 - m0) <= 1e-10 * cfg.t_end);
  }
}

TEST_CASE("run bookkeeping") {
  const Grid2D g{41, 41, 1.0, 1.0};
  auto cfg = SolverConfig::for_model(analyze_nonlinearity(Nonlinearity::cubic()), 0.1);
  const Field2D u0 = init_field(InitialDataSpec{}, g);

  SUBCASE("tEnd = 0 gives the initial field") {
    cfg.t_end = 0.0;
    const auto traj = run(u0, cfg);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].values == u0.values);
    CHECK(traj.mass_series.size() == 1);
  }

  SUBCASE("snapshots and final time") {
    cfg.t_end = 0.01;
    cfg.snapshot_every = 10;
    const double dt = cfg.time_step(g);
    const long n = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));
    const auto traj = run(u0, cfg);
    CHECK(traj.mass_series.size() == static_cast<std::size_t>(n + 1));
    CHECK(traj.snapshots.back().time == doctest::Approx(cfg.t_end).epsilon(1e-15));
    CHECK(traj.snapshots.size() == static_cast<std::size_t>(1 + n / 10 + (n % 10 ? 1 : 0)));
  }

  SUBCASE("observer can stop early") {
    cfg.t_end = 0.01;
    int calls = 0;
    const auto traj = run(u0, cfg, [&](const Field2D&, double) { return ++calls < 5; });
    CHECK(calls == 5);
    CHECK(traj.mass_series.size() == 5);
  }

  SUBCASE("configuration checks") {
    cfg.dt = 1.0;
    CHECK_THROWS_AS(run(u0, cfg), Error);
    cfg.dt = 0.0;
    cfg.epsilon = 0.05;  // h = 0.025 > eps / 4
    CHECK_THROWS_AS(run(u0, cfg), Error);
  }
}

TEST_CASE("divergence guard") {
  const Grid2D g{17, 17, 1.0, 1.0};
  SolverConfig cfg;
  cfg.epsilon = 0.25;
  cfg.reaction = Nonlinearity::polynomial({0.0, 0.0, 0.0, 1.0}, 0.0);
  cfg.F1 = 1.0;
  Field2D u(g, 3.0);
  try {
    for (int k = 0; k < 10000; ++k) u = step(u, cfg);
    FAIL("expected Diverged");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Diverged);
  }
}

TEST_CASE("determinism across worker counts") {
  const Grid2D g{41, 41, 1.0, 1.0};
  auto cfg = SolverConfig::for_model(analyze_nonlinearity(Nonlinearity::cubic()), 0.1);
  cfg.t_end = 0.005;
  const Field2D u0 = init_field(InitialDataSpec{}, g);
  for (Scheme s : {Scheme::Explicit, Scheme::Imex}) {
    cfg.scheme = s;
    cfg.workers = 1;
    const auto a = run(u0, cfg);
    cfg.workers = 4;
    const auto b = run(u0, cfg);
    CHECK(a.snapshots.back().values == b.snapshots.back().values);
    CHECK(a.mass_series == b.mass_series);
  }
}

TEST_CASE("IMEX is first order in dt") {
  const Grid2D g{41, 41, 1.0, 1.0};
  auto cfg = SolverConfig::for_model(analyze_nonlinearity(Nonlinearity::cubic()), 0.1);
  cfg.scheme = Scheme::Imex;
  cfg.t_end = 0.02;
  InitialDataSpec spec;
  spec.width = 0.1;
  const Field2D u0 = init_field(spec, g);
  std::vector<Field2D> finals;
  for (double dt : {2e-3, 1e-3, 5e-4, 2.5e-4}) {
    cfg.dt = dt;
    finals.push_back(run(u0, cfg).snapshots.back());
  }
  const double e1 = max_abs_difference(finals[0], finals[1]);
  const double e2 = max_abs_difference(finals[1], finals[2]);
  const double e3 = max_abs_difference(finals[2], finals[3]);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.25));
  CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("solution stays in the bistable range after generation") {
  const double eps = 0.04;
  const auto model = analyze_nonlinearity(Nonlinearity::cubic());
  const Grid2D g = Grid2D::with_spacing(eps / 4);
  auto cfg = SolverConfig::for_model(model, eps);
  const double t_gen = eps * eps * std::abs(std::log(eps)) / model.mu;
  cfg.t_end = 3 * t_gen;
  double worst = 0.0;
  run(init_field(InitialDataSpec{}, g), cfg, [&](const Field2D& u, double) {
    if (u.time >= t_gen) worst = std::max(worst, u.sup_norm());
    return true;
  });
  CHECK(worst > 0.9);
  CHECK(worst <= 1.1);
}

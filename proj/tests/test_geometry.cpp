#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlac/error.hpp"
#include "nlac/field_solver.hpp"
#include "nlac/geometry.hpp"

using namespace nlac;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
Field2D sample(const Grid2D& g, F&& f) {
  Field2D u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.at(i, j) = f(g.x(i), g.y(j));
  return u;
}

Contour circle(double cx, double cy, double r, int n = 4000) {
  Contour c;
  c.loops.push_back(circle_polyline(cx, cy, r, n));
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::ConfigInvalid;
}

}  // namespace

TEST_CASE("contour extraction") {
  const Grid2D g{101, 101, 1.0, 1.0};

  SUBCASE("vertical line") {
    const Contour c = extract_contour(sample(g, [](double x, double) { return x - 0.5; }), 0.0);
    REQUIRE(c.loops.size() == 1);
    const auto& p = c.loops[0];
    CHECK_FALSE(p.closed);
    for (const Point& q : p.points) CHECK(std::abs(q.x - 0.5) <= 1e-14);
    // Low side (x < 0.5) on the left means the line runs upwards.
    CHECK(p.points.back().y > p.points.front().y);
    CHECK(c.length() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("cone gives a counter-clockwise circle") {
    const Contour c = extract_contour(
        sample(g, [](double x, double y) { return std::hypot(x - 0.5, y - 0.5) - 0.25; }), 0.0);
    REQUIRE(c.loops.size() == 1);
    CHECK(c.loops[0].closed);
    CHECK(std::abs(c.length() - 2 * kPi * 0.25) <= 2 * g.h());
    CHECK(region_areas(c, 1.0).area_minus > 0);
  }

  SUBCASE("annulus gives two loops with opposite orientation") {
    const Contour c = extract_contour(
        sample(g, [](double x, double y) { return std::abs(std::hypot(x - 0.5, y - 0.5) - 0.3) - 0.1; }),
        0.0);
    REQUIRE(c.loops.size() == 2);
    const RegionAreas r = region_areas(c, 1.0);
    CHECK(r.area_minus == doctest::Approx(kPi * (0.4 * 0.4 - 0.2 * 0.2)).epsilon(2e-3));
  }

  SUBCASE("saddle cells follow the cell average") {
    // Checkerboard corners around the cell at the centre of a 17x17 grid.
    const Grid2D s{17, 17, 1.0, 1.0};
    auto low_average = sample(s, [](double x, double y) { return (x - 0.5) * (y - 0.5) - 0.001; });
    auto high_average = sample(s, [](double x, double y) { return (x - 0.5) * (y - 0.5) + 0.001; });
    CHECK(extract_contour(low_average, 0.0).loops.size() == 2);
    CHECK(extract_contour(high_average, 0.0).loops.size() == 2);
  }

  SUBCASE("no crossing") {
    CHECK(kind_of([&] { extract_contour(Field2D(g, 1.0), 0.0); }) == ErrorKind::EmptyContour);
  }
}

TEST_CASE("signed distance") {
  const Grid2D g{101, 101, 1.0, 1.0};

  SUBCASE("circle") {
    const Contour c = circle(0.5, 0.5, 0.25);
    const auto sd = signed_distance(c, g, 0.1);
    CHECK(sd.raw[g.index(50, 50)] == doctest::Approx(-0.25).epsilon(1e-6));
    CHECK(sd.d[g.index(50, 50)] == -0.2);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double exact = std::hypot(g.x(i) - 0.5, g.y(j) - 0.5) - 0.25;
        CHECK(std::abs(sd.raw[g.index(i, j)] - exact) <= 1e-5);
      }
    for (const Point& p : c.loops[0].points) CHECK(std::abs(signed_distance_at(c, p)) <= 1e-15);
  }

  SUBCASE("flat interface has unit gradient and saturates") {
    const Contour c = extract_contour(sample(g, [](double x, double) { return x - 0.5; }), 0.0);
    const auto sd = signed_distance(c, g, 0.1);
    double worst = 0.0, top = 0.0;
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        top = std::max(top, std::abs(sd.d[g.index(i, j)]));
        if (std::abs(sd.raw[g.index(i, j)]) >= 0.1 - g.hx()) continue;
        const double dx = (sd.d[g.index(i + 1, j)] - sd.d[g.index(i - 1, j)]) / (2 * g.hx());
        const double dy = (sd.d[g.index(i, j + 1)] - sd.d[g.index(i, j - 1)]) / (2 * g.hy());
        worst = std::max(worst, std::abs(std::hypot(dx, dy) - 1.0));
      }
    CHECK(worst <= 1e-6);
    CHECK(top == 0.2);
    CHECK(sd.raw[g.index(0, 10)] == doctest::Approx(-0.5));
  }

  SUBCASE("cut-off profile") {
    const double d0 = 0.1;
    double prev = -1.0;
    for (int k = -400; k <= 400; ++k) {
      const double s = 0.001 * k;
      const double v = cutoff_distance(s, d0);
      CHECK(v >= prev);
      CHECK(v == doctest::Approx(-cutoff_distance(-s, d0)));
      prev = v;
    }
    CHECK(cutoff_distance(0.05, d0) == 0.05);
    CHECK(cutoff_distance(0.25, d0) == 0.2);
    const double e = 1e-7;
    CHECK((cutoff_distance(d0 + e, d0) - d0) / e == doctest::Approx(1.0).epsilon(1e-5));
    CHECK((0.2 - cutoff_distance(2 * d0 - e, d0)) / e == doctest::Approx(0.0).epsilon(1e-5));
  }

  SUBCASE("recovered from a tanh field") {
    const Field2D u = sample(g, [](double x, double y) {
      return std::tanh((std::hypot(x - 0.4, y - 0.55) - 0.2) / 0.05);
    });
    const auto sd = signed_distance(extract_contour(u, 0.0), g, 0.1);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double exact = std::hypot(g.x(i) - 0.4, g.y(j) - 0.55) - 0.2;
        if (std::abs(exact) < 0.1) CHECK(std::abs(sd.raw[g.index(i, j)] - exact) <= g.h());
      }
  }
}

TEST_CASE("region areas") {
  const double R = 0.2;
  CHECK(region_areas(circle(0.5, 0.5, R), 1.0).gamma ==
        doctest::Approx(1 - 2 * kPi * R * R).epsilon(1e-6));
  CHECK(std::abs(region_areas(circle(0.5, 0.5, 1 / std::sqrt(2 * kPi)), 1.0).gamma) <= 1e-6);

  Contour two = circle(0.3, 0.3, 0.1);
  two.loops.push_back(circle_polyline(0.7, 0.7, 0.15, 4000));
  CHECK(region_areas(two, 1.0).area_minus ==
        doctest::Approx(kPi * (0.01 + 0.0225)).epsilon(1e-6));

  // Shoelace against a node count on the grid.
  const Grid2D g{201, 201, 1.0, 1.0};
  const Field2D u = sample(g, [](double x, double y) {
    return std::hypot((x - 0.5) / 0.3, (y - 0.5) / 0.2) - 1.0;
  });
  double count = 0;
  for (double v : u.values) count += v < 0 ? 1 : 0;
  const double pixel = count * g.hx() * g.hy();
  CHECK(std::abs(region_areas(extract_contour(u, 0.0), 1.0).area_minus - pixel) <= 4 * g.h());

  Contour open = extract_contour(sample(g, [](double x, double) { return x - 0.5; }), 0.0);
  CHECK(kind_of([&] { region_areas(open, 1.0); }) == ErrorKind::BadInterface);
}

TEST_CASE("curvature") {
  const Grid2D g{101, 101, 1.0, 1.0};

  SUBCASE("circle of radius 0.25") {
    const Field2D u = sample(g, [](double x, double y) {
      return std::tanh((std::hypot(x - 0.5, y - 0.5) - 0.25) / 0.05);
    });
    const auto ks = curvature_samples(extract_contour(u, 0.0));
    REQUIRE(ks.size() >= 8);
    for (const auto& s : ks) CHECK(s.kappa == doctest::Approx(4.0).epsilon(0.05));
  }

  SUBCASE("straight side") {
    const auto ks =
        curvature_samples(extract_contour(sample(g, [](double x, double y) { return x - 0.3 + 0.2 * y; }), 0.0));
    for (const auto& s : ks) CHECK(std::abs(s.kappa) <= 1e-8);
  }

  SUBCASE("ellipse") {
    const Field2D u = sample(g, [](double x, double y) {
      const double q = (x - 0.5) * (x - 0.5) / 0.09 + (y - 0.5) * (y - 0.5) / 0.04 - 1.0;
      return std::tanh(0.1 * q / 0.05);
    });
    double kmax = 0.0;
    for (const auto& s : curvature_samples(extract_contour(u, 0.0))) kmax = std::max(kmax, s.kappa);
    CHECK(kmax == doctest::Approx(0.3 / 0.04).epsilon(0.1));
  }
}

TEST_CASE("hausdorff distance") {
  const double h = 0.005;
  const Contour a = circle(0.5, 0.5, 0.25);
  CHECK(hausdorff(a, a, h) == 0.0);
  CHECK(hausdorff(a, circle(0.5, 0.5, 0.27), h) == doctest::Approx(0.02).epsilon(1e-3));
  CHECK(hausdorff(a, circle(0.51, 0.5, 0.25), h) == doctest::Approx(0.01).epsilon(1e-3));

  const Contour b = circle(0.48, 0.52, 0.22, 300);
  const Contour c = circle(0.55, 0.5, 0.3, 500);
  const double ab = hausdorff(a, b, h), ba = hausdorff(b, a, h);
  CHECK(ab == doctest::Approx(ba));
  CHECK(hausdorff(a, c, h) <= ab + hausdorff(b, c, h) + 1e-12);
  CHECK(ab <= hausdorff(a, c, h) + hausdorff(c, b, h) + 1e-12);
}

TEST_CASE("transition width") {
  const double eta = 0.1;
  const double z = std::sqrt(2.0) * std::atanh(1 - eta);
  std::vector<double> ratio;
  for (double eps : {0.04, 0.02}) {
    const Grid2D g = Grid2D::with_spacing(eps / 8);
    const Field2D u = sample(g, [eps](double x, double y) {
      return std::tanh((std::hypot(x - 0.5, y - 0.5) - 0.25) / (std::sqrt(2.0) * eps));
    });
    const Contour c = extract_contour(u, 0.0);
    const WidthEstimate w = transition_width(u, eta, c);
    ratio.push_back(w.width / eps);
    CHECK(w.width / eps == doctest::Approx(2 * z).epsilon(0.05));
    CHECK(w.max_extent / eps == doctest::Approx(2 * z).epsilon(0.1));

    // Nested bands: a larger eta gives a thinner band.
    double prev = 1e300;
    for (double e : {0.05, 0.1, 0.2, 0.4}) {
      const double width = transition_width(u, e, c).width;
      CHECK(width < prev);
      prev = width;
    }
  }
  CHECK(ratio[0] == doctest::Approx(ratio[1]).epsilon(0.05));

  const Grid2D g{33, 33, 1.0, 1.0};
  CHECK(kind_of([&] { transition_width(Field2D(g, 1.0), eta, extract_contour(Field2D(g, 1.0), 0.0)); }) ==
        ErrorKind::EmptyContour);
  CHECK(kind_of([&] { transition_width(Field2D(g, 1.0), eta, Contour{}); }) == ErrorKind::EmptyContour);
}

TEST_CASE("mass tracks the contour area") {
  const double eps = 0.02;
  const auto model = analyze_nonlinearity(Nonlinearity::cubic());
  const Grid2D g = Grid2D::with_spacing(eps / 4);
  auto cfg = SolverConfig::for_model(model, eps);
  cfg.t_end = 2 * eps * eps * std::abs(std::log(eps)) / model.mu;
  InitialDataSpec spec;
  spec.r0 = 0.3;
  const auto traj = run(init_field(spec, g), cfg);
  const Field2D& u = traj.snapshots.back();
  const double gamma = region_areas(extract_contour(u, model.a), g.area()).gamma;
  CHECK(std::abs(mass(u) - gamma) <= eps);
}

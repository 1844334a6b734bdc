#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlac/error.hpp"
#include "nlac/interface_limit.hpp"

using namespace nlac;

namespace {

constexpr double kPi = std::numbers::pi;

Contour circle(double r, double cx = 0.5, double cy = 0.5) {
  Contour c;
  c.loops.push_back(circle_polyline(cx, cy, r, 2000));
  return c;
}

double contour_radius(const LevelSetState& s) {
  return std::sqrt(region_areas(levelset_contour(s), s.domain_area).area_minus / kPi);
}

// Oracle: plain bisection on g(R) = -1/R + c0 (A - 2 pi R^2).
double bisect_root(double c0, double A, double lo, double hi) {
  auto g = [&](double R) { return -1.0 / R + c0 * (A - 2 * kPi * R * R); };
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) > 0) == (g(lo) > 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("radial reference") {
  SUBCASE("curve shortening closed form") {
    const auto s = radial_evolve(0.3, 0.0, 1.0, 0.05, 0.001);
    CHECK(s.extinct);
    CHECK(s.extinction_time == doctest::Approx(0.045).epsilon(1e-9));
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      const double exact = std::sqrt(std::max(0.0, 0.09 - 2 * s.t[k]));
      CHECK(s.R[k] == doctest::Approx(exact).epsilon(1e-8));
    }
    CHECK(s.radius_at(0.0305) == doctest::Approx(std::sqrt(0.09 - 0.061)).epsilon(1e-8));
    CHECK(s.radius_at(0.046) == 0.0);
    CHECK(s.gamma.front() == doctest::Approx(1 - 2 * kPi * 0.09));
  }

  SUBCASE("equilibrium stays put") {
    const auto roots = radial_steady_states(10.0, 1.0);
    REQUIRE(roots.size() == 2);
    for (const auto& r : roots) {
      const auto s = radial_evolve(r.R, 10.0, 1.0, 0.01, 0.001);
      for (double R : s.R) CHECK(std::abs(R - r.R) <= 1e-8);
    }
  }

  SUBCASE("approach to the stable root") {
    const double stable = bisect_root(10.0, 1.0, 0.2, 0.5);
    CHECK(stable > 0.30);
    CHECK(stable < 0.35);
    const auto s = radial_evolve(0.32, 10.0, 1.0, 0.5, 0.01);
    CHECK(std::abs(s.R.back() - stable) < 1e-3 * std::abs(0.32 - stable));
    for (std::size_t k = 1; k < s.R.size(); ++k) CHECK(s.R[k] >= s.R[k - 1]);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(radial_evolve(-0.1, 0.0, 1.0, 0.1, 0.01), Error);
    try {
      radial_evolve(0.5, 10.0, 1.0, 0.1, 0.01, 0.45);
      FAIL("expected BadInterface");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BadInterface);
    }
  }
}

TEST_CASE("radial steady states") {
  CHECK(radial_steady_states(0.0, 1.0).empty());
  CHECK(radial_steady_states(3 / std::sqrt(2.0), 1.0).empty());

  const auto roots = radial_steady_states(10.0, 1.0);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].R == doctest::Approx(bisect_root(10.0, 1.0, 0.01, 0.2)).epsilon(1e-10));
  CHECK(roots[1].R == doctest::Approx(bisect_root(10.0, 1.0, 0.2, 0.5)).epsilon(1e-10));
  CHECK_FALSE(roots[0].stable);
  CHECK(roots[1].stable);

  // Perturbed starts leave the unstable root and return to the stable one.
  const double d = 0.005;
  const double lo = roots[0].R, hi = roots[1].R;
  CHECK(radial_evolve(lo + d, 10.0, 1.0, 0.05, 0.01).R.back() > lo + d);
  CHECK(radial_evolve(lo - d, 10.0, 1.0, 0.05, 0.01).extinct);
  CHECK(std::abs(radial_evolve(hi + d, 10.0, 1.0, 0.2, 0.01).R.back() - hi) < 1e-4);
  CHECK(std::abs(radial_evolve(hi - d, 10.0, 1.0, 0.2, 0.01).R.back() - hi) < 1e-4);
}

TEST_CASE("level-set motion") {
  const Grid2D g{65, 65, 1.0, 1.0};

  SUBCASE("curve shortening of a circle") {
    const auto s0 = levelset_from_contour(circle(0.3), g, 0.0, 1.0);
    double worst = 0.0;
    int calls = 0;
    levelset_evolve(s0, 0.04, {}, [&](const LevelSetState& s) {
      if (calls++ % 20 != 0) return true;
      const double exact = std::sqrt(0.09 - 2 * s.time);
      worst = std::max(worst, std::abs(contour_radius(s) - exact) / exact);
      return true;
    });
    CHECK(worst <= 0.02);
  }

  SUBCASE("balanced areas leave only curvature") {
    const double R = 1 / std::sqrt(2 * kPi);
    const auto s0 = levelset_from_contour(circle(R), g, 5.0, 1.0);
    CHECK(std::abs(levelset_gamma(s0)) <= 2 * g.h() * 2 * kPi * R);
    const double tau = 2e-4;
    const auto s1 = levelset_evolve(s0, tau);
    const double velocity = (contour_radius(s1) - contour_radius(s0)) / tau;
    CHECK(velocity == doctest::Approx(-1 / R).epsilon(0.05));
  }

  SUBCASE("one step matches the radial law near the contour") {
    const double R = 0.25, c0 = 1.0;
    const auto s0 = levelset_from_contour(circle(R), g, c0, 1.0);
    const double gamma = levelset_gamma(s0);
    const double dt = levelset_default_dt(g);
    const auto s1 = levelset_step(s0, dt);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double r = std::hypot(g.x(i) - 0.5, g.y(j) - 0.5);
        if (std::abs(r - R) > g.h()) continue;
        const std::size_t k = g.index(i, j);
        const double rate = (s1.phi[k] - s0.phi[k]) / dt;
        CHECK(std::abs(rate - (1 / r - c0 * gamma)) <= 4 * g.h() * (1 / (R * R) + c0 * std::abs(gamma)));
      }
  }

  SUBCASE("agrees with the radial reference") {
    const double c0 = 1.0, R0 = 0.25;
    const auto ref = radial_evolve(R0, c0, 1.0, 0.05, 1e-4);
    const double t_end = 0.8 * (ref.extinct ? ref.extinction_time : 0.05);
    double worst = 0.0;
    double gamma_gap = 0.0;
    int calls = 0;
    levelset_evolve(levelset_from_contour(circle(R0), g, c0, 1.0), t_end, {},
                    [&](const LevelSetState& s) {
                      if (calls++ % 50 != 0) return true;
                      const Contour c = levelset_contour(s);
                      worst = std::max(worst, hausdorff(c, circle(ref.radius_at(s.time)), g.h() / 2));
                      gamma_gap = std::max(gamma_gap, std::abs(levelset_gamma(s) -
                                                               region_areas(c, 1.0).gamma) /
                                                          c.length());
                      return true;
                    });
    CHECK(worst <= 2 * g.h());
    CHECK(gamma_gap <= 2 * g.h());
  }

  SUBCASE("positive forcing expands the enclosed region") {
    const double R0 = 0.2;  // gamma = 1 - 2 pi R0^2 > 0
    const auto a = levelset_evolve(levelset_from_contour(circle(R0), g, 0.0, 1.0), 0.005);
    const auto b = levelset_evolve(levelset_from_contour(circle(R0), g, 2.0, 1.0), 0.005);
    CHECK(contour_radius(b) > contour_radius(a));
    const auto ra = radial_evolve(R0, 0.0, 1.0, 0.005, 0.001).R.back();
    const auto rb = radial_evolve(R0, 2.0, 1.0, 0.005, 0.001).R.back();
    CHECK(rb > ra);
  }

  SUBCASE("collapse is reported") {
    auto s = levelset_from_contour(circle(0.05), g, 0.0, 1.0);
    CHECK_THROWS_AS(levelset_evolve(s, 0.01), Error);
  }
}

TEST_CASE("reinitialization") {
  const Grid2D g{81, 81, 1.0, 1.0};
  const double h = g.h();
  const auto base = levelset_from_contour(circle(0.3, 0.45, 0.52), g, 0.0, 1.0);

  SUBCASE("idempotent on a signed distance") {
    const auto again = reinitialize(base);
    CHECK(hausdorff(levelset_contour(base), levelset_contour(again), h / 4) <= h / 10);
  }

  SUBCASE("rescaled distance returns to unit slope") {
    LevelSetState scaled = base;
    for (double& v : scaled.phi) v *= 3.0;
    const auto fixed = reinitialize(scaled);
    CHECK(hausdorff(levelset_contour(scaled), levelset_contour(fixed), h / 4) <= h / 10);
    for (std::size_t k = 0; k < fixed.phi.size(); ++k) {
      if (std::abs(base.phi[k]) >= 4 * h) continue;
      CHECK(std::abs(fixed.phi[k] - base.phi[k]) <= h / 10);
    }
  }

  SUBCASE("noisy data with the same signs") {
    LevelSetState noisy = base;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double& v = noisy.phi[g.index(i, j)];
        v *= 1.0 + 0.5 * std::sin(37.0 * g.x(i)) * std::cos(23.0 * g.y(j));
      }
    const auto fixed = reinitialize(noisy);
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        if (std::abs(fixed.phi[g.index(i, j)]) >= 3 * h) continue;
        const double px = (fixed.phi[g.index(i + 1, j)] - fixed.phi[g.index(i - 1, j)]) / (2 * h);
        const double py = (fixed.phi[g.index(i, j + 1)] - fixed.phi[g.index(i, j - 1)]) / (2 * h);
        CHECK(std::hypot(px, py) == doctest::Approx(1.0).epsilon(0.05));
      }
  }
}

#include <cmath>
#include <random>
#include <stdexcept>

#include "clrpod/astro.hpp"
#include "doctest.h"

using namespace clrpod::astro;

namespace {

double deg(double d) { return d * kPi / 180.0; }

CircularOrbit random_orbit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ua(0.25, 1.6);
  std::uniform_real_distribution<double> ui(0.0, kPi);
  std::uniform_real_distribution<double> ur(0.0, kTwoPi);
  return {ua(rng), ui(rng), ur(rng)};
}

// Central differences on the depot's elements; the oracle only calls the
// value functions, never the analytic gradients.
template <typename F>
OrbitGradient central_difference(F&& f, const CircularOrbit& o, double h) {
  OrbitGradient g;
  g.d_da = (f(CircularOrbit::unwrapped(o.a() + h, o.inclination(), o.raan())) -
            f(CircularOrbit::unwrapped(o.a() - h, o.inclination(), o.raan()))) /
           (2 * h);
  g.d_di = (f(CircularOrbit::unwrapped(o.a(), o.inclination() + h, o.raan())) -
            f(CircularOrbit::unwrapped(o.a(), o.inclination() - h, o.raan()))) /
           (2 * h);
  g.d_draan =
      (f(CircularOrbit::unwrapped(o.a(), o.inclination(), o.raan() + h)) -
       f(CircularOrbit::unwrapped(o.a(), o.inclination(), o.raan() - h))) /
      (2 * h);
  return g;
}

bool close(double analytic, double numeric, double rel, double abs_tol) {
  return std::abs(analytic - numeric) <=
         std::max(abs_tol, rel * std::max(std::abs(analytic), std::abs(numeric)));
}

}  // namespace

TEST_CASE("orbit construction validates and normalizes") {
  CircularOrbit o(1.0, deg(55), deg(-10));
  CHECK(o.raan() == doctest::Approx(deg(350)));
  CHECK_THROWS_AS(CircularOrbit(0.0, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CircularOrbit(1.0, -0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CircularOrbit(1.0, kPi + 0.01, 0.0), std::invalid_argument);
  CHECK(wrap_two_pi(kTwoPi) == 0.0);
  CHECK(wrap_two_pi(-1e-18) < kTwoPi);
}

TEST_CASE("tilt angle examples") {
  CircularOrbit same(1.0, deg(55), deg(17.5));
  CHECK(tilt_angle(same, same) <= 1e-7);
  CHECK(tilt_angle({1, deg(90), 0}, {1, deg(90), deg(90)}) ==
        doctest::Approx(kPi / 2));
  CHECK(tilt_angle({1, 0, deg(123)}, {1, deg(40), deg(7)}) ==
        doctest::Approx(deg(40)));
}

TEST_CASE("tilt angle gradient examples") {
  CircularOrbit same(1.0, deg(55), deg(17.5));
  OrbitGradient g = tilt_angle_grad(same, same);
  CHECK(g.d_da == 0.0);
  CHECK(g.d_di == 0.0);
  CHECK(g.d_draan == 0.0);

  CircularOrbit depot(1, deg(90), 0);
  CircularOrbit target(1, deg(90), deg(90));
  g = tilt_angle_grad(depot, target);
  auto fd = central_difference(
      [&](const CircularOrbit& d) { return tilt_angle(d, target); }, depot, 1e-6);
  CHECK(g.d_draan == doctest::Approx(fd.d_draan).epsilon(1e-6));
  CHECK(g.d_draan == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(g.d_da == 0.0);

  // Planes more than 2 rad apart: saturated branch.
  g = tilt_angle_grad({1, deg(10), 0}, {1, deg(170), deg(180)});
  CHECK(g.d_di == 0.0);
  CHECK(g.d_draan == 0.0);
}

TEST_CASE("edelbaum dv examples") {
  CircularOrbit o(1.3, deg(20), deg(33));
  CHECK(edelbaum_dv(o, o) == 0.0);
  CHECK(edelbaum_dv({1, deg(30), deg(40)}, {4, deg(30), deg(40)}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CircularOrbit far1(1, deg(10), 0);
  CircularOrbit far2(1, deg(170), deg(180));
  REQUIRE(tilt_angle(far1, far2) > 2.0);
  CHECK(edelbaum_dv(far1, far2) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("edelbaum dv gradient examples") {
  CircularOrbit o(1.3, deg(20), deg(33));
  OrbitGradient g = edelbaum_dv_grad(o, o);
  CHECK(g.d_da == 0.0);
  CHECK(g.d_di == 0.0);
  CHECK(g.d_draan == 0.0);

  CircularOrbit depot(1.0, deg(50), deg(30));
  CircularOrbit target(1.5, deg(55), deg(38));
  const double theta = tilt_angle(depot, target);
  CHECK(theta > 0.05);
  CHECK(theta < 0.3);
  g = edelbaum_dv_grad(depot, target);
  auto fd = central_difference(
      [&](const CircularOrbit& d) { return edelbaum_dv(d, target); }, depot,
      1e-7);
  CHECK(close(g.d_da, fd.d_da, 1e-6, 1e-9));
  CHECK(close(g.d_di, fd.d_di, 1e-6, 1e-9));
  CHECK(close(g.d_draan, fd.d_draan, 1e-6, 1e-9));

  CircularOrbit far1(1.2, deg(10), 0);
  CircularOrbit far2(0.8, deg(170), deg(180));
  g = edelbaum_dv_grad(far1, far2);
  CHECK(g.d_di == 0.0);
  CHECK(g.d_draan == 0.0);
  // d/da of (a^-1/2 + a_t^-1/2).
  CHECK(g.d_da == doctest::Approx(-0.5 * std::pow(1.2, -1.5)).epsilon(1e-12));
}

TEST_CASE("launch and deployment burns") {
  auto [l0, d0] = launch_deploy_dv(0.4, 0.4);
  CHECK(l0 == doctest::Approx(0.0).scale(1));
  CHECK(d0 == doctest::Approx(0.0).scale(1));

  // Scratch evaluation with r0 = 7000 km, a = 26560.32 km, DU = 26560 km.
  auto [l, d] = launch_deploy_dv(26560.32 / 26560.0, 7000.0 / 26560.0);
  CHECK(l == doctest::Approx(0.5027705027422373).epsilon(1e-13));
  CHECK(d == doctest::Approx(0.35411915372536795).epsilon(1e-13));

  const double r0 = 7000.0 / 26560.0;
  auto [linf, dinf] = launch_deploy_dv(1e9, r0);
  CHECK(linf == doctest::Approx(std::sqrt(2 / r0) - std::sqrt(1 / r0)).epsilon(1e-4));
  CHECK(dinf >= 0.0);

  CHECK_THROWS_AS(launch_deploy_dv(0.2, r0), std::invalid_argument);
}

TEST_CASE("EMLEO factor") {
  PropulsionParams prop;
  CanonicalScale scale;
  const double r0 = 7000.0 / 26560.0;
  CHECK(emleo_factor(r0, r0, prop, scale) == 1.0);
  CHECK(emleo_factor(26560.32 / 26560.0, r0, prop, scale) ==
        doctest::Approx(2.390382762587389).epsilon(1e-12));

  // The Hohmann total peaks near 3.22 DU (about 85,600 km); the grid stays
  // below that, covering LEO through beyond GEO.
  double prev = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double a = r0 + (3.0 - r0) * k / 1000.0;
    const double phi = emleo_factor(a, r0, prop, scale);
    REQUIRE(phi > prev);
    prev = phi;
  }
}

TEST_CASE("EMLEO factor gradient") {
  PropulsionParams prop;
  CanonicalScale scale;
  const double h = 1e-7;
  const double g = emleo_factor_grad(2.0, 1.0, prop, scale);
  const double fd = (emleo_factor(2.0 + h, 1.0, prop, scale) -
                     emleo_factor(2.0 - h, 1.0, prop, scale)) /
                    (2 * h);
  CHECK(g == doctest::Approx(fd).epsilon(1e-6));
  CHECK(g > 0.0);
  // Finite at the bound a == r0.
  const double r0 = 7000.0 / 26560.0;
  CHECK(std::isfinite(emleo_factor_grad(r0, r0, prop, scale)));
  CHECK(emleo_factor_grad(r0, r0, prop, scale) > 0.0);
}

TEST_CASE("tilt symmetry and clamp safety over random pairs") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 10000; ++n) {
    CircularOrbit x = random_orbit(rng);
    CircularOrbit y = random_orbit(rng);
    const double t = tilt_angle(x, y);
    REQUIRE(std::isfinite(t));
    REQUIRE(t >= 0.0);
    REQUIRE(t <= kPi);
    REQUIRE(t == doctest::Approx(tilt_angle(y, x)).epsilon(1e-12));
    const double dv = edelbaum_dv(x, y);
    REQUIRE(dv == doctest::Approx(edelbaum_dv(y, x)).epsilon(1e-12));
    REQUIRE(dv + 1e-12 >= std::abs(circular_velocity(x.a()) -
                                   circular_velocity(y.a())));
  }
  // Nearly parallel normals where the cosine rounds past 1.
  CircularOrbit p(1.0, 1e-9, 0.3);
  CircularOrbit q(1.0, 1e-9, 0.3 + 1e-12);
  CHECK(std::isfinite(tilt_angle(p, q)));
  CHECK(std::isfinite(edelbaum_dv_grad(p, q).d_di));
}

TEST_CASE("analytic dv gradient matches finite differences on random pairs") {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 1000) {
    CircularOrbit depot = random_orbit(rng);
    CircularOrbit target = random_orbit(rng);
    const double theta = tilt_angle(depot, target);
    if (edelbaum_dv(depot, target) <= 1e-3 || theta <= 1e-3 ||
        theta >= 2.0 - 1e-3) {
      continue;
    }
    // Keep the finite-difference stencil inside the valid inclination range.
    if (depot.inclination() < 1e-3 || depot.inclination() > kPi - 1e-3) continue;
    const OrbitGradient g = edelbaum_dv_grad(depot, target);
    const OrbitGradient fd = central_difference(
        [&](const CircularOrbit& d) { return edelbaum_dv(d, target); }, depot,
        1e-6);
    REQUIRE(close(g.d_da, fd.d_da, 1e-6, 1e-9));
    REQUIRE(close(g.d_di, fd.d_di, 1e-6, 1e-9));
    REQUIRE(close(g.d_draan, fd.d_draan, 1e-6, 1e-9));
    ++checked;
  }
}

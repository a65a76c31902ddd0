#include <cmath>
#include <stdexcept>

#include "clrpod/generate.hpp"
#include "clrpod/io.hpp"
#include "clrpod/locate.hpp"
#include "doctest.h"

using namespace clrpod;
using namespace clrpod::locate;

namespace {

constexpr double kDeg = astro::kPi / 180.0;

std::vector<RouteConstants> constants_of(const std::vector<Route>& routes,
                                         const Instance& inst) {
  std::vector<RouteConstants> out;
  for (const Route& r : routes) out.push_back(route_constants(r, inst));
  return out;
}

double component(const model::CircularOrbit& o, int c) {
  return c == 0 ? o.a() : c == 1 ? o.inclination() : o.raan();
}

model::CircularOrbit nudged(const model::CircularOrbit& o, int c, double h) {
  double e[3] = {o.a(), o.inclination(), o.raan()};
  e[c] += h;
  return model::CircularOrbit::unwrapped(e[0], e[1], e[2]);
}

double grad_component(const astro::OrbitGradient& g, int c) {
  return c == 0 ? g.d_da : c == 1 ? g.d_di : g.d_draan;
}

std::vector<Route> gps_routes(const std::vector<std::vector<std::vector<int>>>& by_depot) {
  std::vector<Route> routes;
  for (int k = 0; k < static_cast<int>(by_depot.size()); ++k) {
    for (const auto& seq : by_depot[k]) routes.push_back(Route{k, 0, seq});
  }
  return routes;
}

const std::vector<Route> kGpsFirst = gps_routes(
    {{{17, 7, 11, 5}, {3, 9, 14}}, {{6, 4}, {15, 1, 13}}, {{0, 2, 10}, {16, 12, 8}}});
const std::vector<Route> kGpsSecond = gps_routes(
    {{{3, 9, 14}, {17, 7, 11, 5}}, {{4, 6, 15, 1, 13}}, {{16, 12, 8}, {0, 2, 10}}});

Instance gps() { return io::read_instance(CLRPOD_DATA_DIR "/gps18.json"); }

}  // namespace

TEST_CASE("route constants of degenerate routes") {
  Instance inst = model::mission_defaults(1, 1);
  const model::CircularOrbit o(inst.scale.to_du(12000.0), 40.0 * kDeg, 0.7);
  inst.satellites = {{o, 100.0}, {o, 250.0}};

  const RouteConstants one = route_constants(Route{0, 0, {1}}, inst);
  CHECK(one.A == doctest::Approx(500.0));
  CHECK(one.B == doctest::Approx(250.0));
  CHECK(one.C == doctest::Approx(750.0));
  CHECK(one.interior_dv == 0.0);

  const RouteConstants both = route_constants(Route{0, 0, {0, 1}}, inst);
  CHECK(both.interior_dv == 0.0);
  CHECK(start_mass(both, o, inst) == doctest::Approx(850.0));
  CHECK(route_propellant(both, o, inst) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(route_constants(Route{0, 0, {}}, inst), std::invalid_argument);
}

TEST_CASE("closed form start mass agrees with backward propagation") {
  for (int seed = 0; seed < 100; ++seed) {
    const Instance inst = generate::random_instance(2, 6, 40 + seed);
    const DepotPlacement p = generate::random_placement(inst, 80 + seed);
    const Route r{seed % 2, 0, {seed % 6, (seed + 3) % 6, (seed + 1) % 6}};
    const RouteConstants rc = route_constants(r, inst);
    const double direct = model::route_mass_profile(r, p, inst).u_start;
    CHECK(start_mass(rc, p.depots[r.depot], inst) ==
          doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  int checked = 0;
  for (int seed = 0; seed < 30; ++seed) {
    const Instance inst = generate::random_instance(2, 6, 300 + seed);
    const DepotPlacement p = generate::random_placement(inst, 400 + seed);
    const std::vector<Route> routes{Route{0, 0, {0, 1, 2}}, Route{0, 1, {3}},
                                    Route{1, 0, {4, 5}}};
    const auto rcs = constants_of(routes, inst);
    const Objective o = objective_and_grad(p, rcs, inst);
    for (int k = 0; k < 2; ++k) {
      for (int c = 0; c < 3; ++c) {
        const double h = 1e-6 * std::max(1.0, std::abs(component(p.depots[k], c)));
        DepotPlacement hi = p, lo = p;
        hi.depots[k] = nudged(p.depots[k], c, h);
        lo.depots[k] = nudged(p.depots[k], c, -h);
        const double fd = (objective_and_grad(hi, rcs, inst).value -
                           objective_and_grad(lo, rcs, inst).value) / (2.0 * h);
        const double an = grad_component(o.grad[k], c);
        CHECK(an == doctest::Approx(fd).epsilon(1e-5).scale(std::abs(o.value) * 1e-3));
        ++checked;
      }
    }
  }
  CHECK(checked == 180);
}

TEST_CASE("depot gradient blocks are independent") {
  const Instance inst = generate::random_instance(3, 6, 12);
  const DepotPlacement p = generate::random_placement(inst, 13);
  const auto rcs = constants_of(
      {Route{0, 0, {0, 1}}, Route{1, 0, {2, 3}}, Route{2, 0, {4, 5}}}, inst);
  const Objective base = objective_and_grad(p, rcs, inst);
  DepotPlacement moved = p;
  moved.depots[1] = nudged(p.depots[1], 1, 0.05);
  const Objective o = objective_and_grad(moved, rcs, inst);
  for (int k : {0, 2}) {
    CHECK(o.grad[k].d_da == base.grad[k].d_da);
    CHECK(o.grad[k].d_di == base.grad[k].d_di);
    CHECK(o.grad[k].d_draan == base.grad[k].d_draan);
  }
  CHECK(o.grad[1].d_di != base.grad[1].d_di);
}

TEST_CASE("a depot without routes gets a zero block and stays put") {
  const Instance inst = generate::random_instance(2, 3, 5);
  const DepotPlacement p = generate::random_placement(inst, 6);
  const std::vector<Route> routes{Route{0, 0, {0, 1, 2}}};
  const Objective o = objective_and_grad(p, constants_of(routes, inst), inst);
  CHECK(o.grad[1].d_da == 0.0);
  CHECK(o.grad[1].d_di == 0.0);
  CHECK(o.grad[1].d_draan == 0.0);
  const NlpResult r = minimize_placement(p, routes, inst);
  CHECK(r.placement.depots[1].a() == p.depots[1].a());
  CHECK(r.placement.depots[1].inclination() == p.depots[1].inclination());
}

TEST_CASE("placement search descends and satisfies first-order conditions") {
  for (int seed = 0; seed < 10; ++seed) {
    const Instance inst = generate::random_instance(2, 6, 700 + seed);
    const DepotPlacement p = generate::random_placement(inst, 800 + seed);
    const std::vector<Route> routes{Route{0, 0, {0, 1, 2}}, Route{1, 0, {3, 4, 5}}};
    const NlpResult r = minimize_placement(p, routes, inst);
    CHECK(r.exit == NlpExit::Converged);
    CHECK(r.objective <= r.initial_objective);
    for (std::size_t t = 1; t < r.trace.size(); ++t) {
      CHECK(r.trace[t] <= r.trace[t - 1]);
    }
    const Objective o = objective_and_grad(r.placement, constants_of(routes, inst), inst);
    const double tol = 1e-6 * std::max(1.0, o.value);
    for (int k = 0; k < 2; ++k) {
      const auto& d = r.placement.depots[k];
      const double lo = inst.depot_radius_floor();
      const double hi = std::max(depot_radius_ceiling(inst), p.depots[k].a());
      CHECK(d.a() >= lo);
      CHECK(d.a() <= hi);
      if (d.a() <= lo * (1.0 + 1e-12)) {
        CHECK(o.grad[k].d_da >= -tol);
      } else if (d.a() >= hi * (1.0 - 1e-12)) {
        CHECK(o.grad[k].d_da <= tol);
      } else {
        CHECK(std::abs(o.grad[k].d_da) <= tol);
      }
      CHECK(std::abs(o.grad[k].d_draan) <= tol);
      CHECK(d.raan() >= 0.0);
      CHECK(d.raan() < 2.0 * astro::kPi);
    }

    // Restarting from the optimum takes no steps.
    const NlpResult again = minimize_placement(r.placement, routes, inst);
    CHECK(again.iterations == 0);
    CHECK(again.objective == doctest::Approx(r.objective).epsilon(1e-12));
  }
}

TEST_CASE("single satellite at the floor radius pulls the depot onto it") {
  Instance inst = model::mission_defaults(1, 1);
  const model::CircularOrbit sat(inst.r_min, 63.0 * kDeg, 2.0);
  inst.satellites = {{sat, 100.0}};
  const DepotPlacement start{{model::CircularOrbit(inst.scale.to_du(9000.0),
                                                   50.0 * kDeg, 1.7)}};
  const NlpResult r = minimize_placement(start, {Route{0, 0, {0}}}, inst);
  CHECK(r.exit == NlpExit::Converged);
  const auto& d = r.placement.depots[0];
  CHECK(d.a() == doctest::Approx(inst.r_min).epsilon(1e-9));
  CHECK(d.inclination() == doctest::Approx(sat.inclination()).epsilon(1e-4));
  CHECK(d.raan() == doctest::Approx(sat.raan()).epsilon(1e-4));
  const double phi = astro::emleo_factor(inst.r_min, inst.r0, inst.prop, inst.scale);
  CHECK(r.objective == doctest::Approx(100.0 * phi).epsilon(1e-6));
}

TEST_CASE("case-study totals") {
  const Instance inst = gps();
  REQUIRE(inst.n_t() == 18);
  const DepotPlacement init{inst.depots_initial};

  const RoutingSolution first = model::make_solution(kGpsFirst, init, inst);
  CHECK(model::validate_solution(first, init, inst).empty());
  CHECK(total_emleo(init, first, inst) == doctest::Approx(7773.987).epsilon(1e-6));

  const NlpResult step0 = minimize_placement(init, kGpsFirst, inst);
  CHECK(step0.exit == NlpExit::Converged);
  const RoutingSolution second = model::make_solution(kGpsSecond, step0.placement, inst);
  CHECK(model::validate_solution(second, step0.placement, inst).empty());
  CHECK(second.objective_emleo == doctest::Approx(4911.74).epsilon(1e-5));

  const NlpResult step1 = minimize_placement(step0.placement, kGpsSecond, inst);
  CHECK(step1.objective == doctest::Approx(4906.058).epsilon(1e-6));
  for (const auto& d : step1.placement.depots) {
    CHECK(inst.scale.to_km(d.a()) == doctest::Approx(7000.0).epsilon(1e-9));
  }
}

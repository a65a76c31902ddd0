#include "clrpod/locate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace clrpod::locate {

using astro::CircularOrbit;
using astro::OrbitGradient;

namespace {

// Canonical dv per unit of log mass ratio for the servicer engine.
double exhaust(const Instance& inst) {
  return inst.prop.g0 * inst.prop.isp_servicer /
         inst.scale.velocity_unit_mps();
}

}  // namespace

const char* to_string(NlpExit e) {
  switch (e) {
    case NlpExit::Converged: return "converged";
    case NlpExit::MaxIter: return "max-iter";
    case NlpExit::LineSearchFail: return "line-search-fail";
  }
  return "unknown";
}

RouteConstants route_constants(const Route& route, const Instance& inst) {
  const auto& seq = route.satellites;
  if (seq.empty()) throw std::invalid_argument("route has no satellites");
  const double c = exhaust(inst);
  RouteConstants rc;
  rc.depot = route.depot;
  rc.first = seq.front();
  rc.last = seq.back();
  const double dry = inst.servicer_dry(route.depot);
  rc.C = dry;
  // Summed interior dv up to each satellite.
  double partial = 0.0;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (n > 0) {
      partial += astro::edelbaum_dv(inst.satellites[seq[n - 1]].orbit,
                                    inst.satellites[seq[n]].orbit);
    }
    const double payload = inst.satellites[seq[n]].payload_kg;
    rc.B += payload * std::exp(partial / c);
    rc.C += payload;
  }
  rc.interior_dv = partial;
  rc.A = dry * std::exp(partial / c);
  return rc;
}

double start_mass(const RouteConstants& rc, const CircularOrbit& depot,
                  const Instance& inst) {
  const double c = exhaust(inst);
  const double e1 =
      std::exp(astro::edelbaum_dv(depot, inst.satellites[rc.first].orbit) / c);
  const double er =
      std::exp(astro::edelbaum_dv(inst.satellites[rc.last].orbit, depot) / c);
  return e1 * (rc.A * er + rc.B);
}

double route_propellant(const RouteConstants& rc, const CircularOrbit& depot,
                        const Instance& inst) {
  return start_mass(rc, depot, inst) - rc.C;
}

Objective objective_and_grad(const DepotPlacement& placement,
                             const std::vector<RouteConstants>& routes,
                             const Instance& inst) {
  const double c = exhaust(inst);
  Objective out;
  out.grad.assign(placement.depots.size(), OrbitGradient{});
  for (const RouteConstants& rc : routes) {
    const CircularOrbit& d = placement.depots.at(rc.depot);
    const CircularOrbit& s1 = inst.satellites[rc.first].orbit;
    const CircularOrbit& sn = inst.satellites[rc.last].orbit;
    const double e1 = std::exp(astro::edelbaum_dv(d, s1) / c);
    const double er = std::exp(astro::edelbaum_dv(sn, d) / c);
    const double phi = astro::emleo_factor(d.a(), inst.r0, inst.prop,
                                           inst.scale);
    const double carried = e1 * (rc.A * er + rc.B) - inst.servicer_dry(rc.depot);
    out.value += carried * phi;

    // Edelbaum dv is symmetric, so both depot legs use the depot-first form.
    OrbitGradient g = (phi * e1 * (rc.A * er + rc.B) / c) *
                      astro::edelbaum_dv_grad(d, s1);
    g += (phi * e1 * rc.A * er / c) * astro::edelbaum_dv_grad(d, sn);
    g.d_da += carried * astro::emleo_factor_grad(d.a(), inst.r0, inst.prop,
                                                 inst.scale);
    out.grad[rc.depot] += g;
  }
  return out;
}

namespace {

// Flattened search state over the depots that carry routes.
struct Problem {
  const Instance* inst;
  const std::vector<RouteConstants>* routes;
  DepotPlacement base;
  std::vector<int> active;
  std::vector<double> lo, hi;

  DepotPlacement placement(const std::vector<double>& x) const {
    DepotPlacement p = base;
    for (std::size_t n = 0; n < active.size(); ++n) {
      p.depots[active[n]] = CircularOrbit::unwrapped(x[3 * n], x[3 * n + 1],
                                                     x[3 * n + 2]);
    }
    return p;
  }

  double eval(const std::vector<double>& x, std::vector<double>& g) const {
    const Objective o = objective_and_grad(placement(x), *routes, *inst);
    g.resize(x.size());
    for (std::size_t n = 0; n < active.size(); ++n) {
      const OrbitGradient& b = o.grad[active[n]];
      g[3 * n] = b.d_da;
      g[3 * n + 1] = b.d_di;
      g[3 * n + 2] = b.d_draan;
    }
    return o.value;
  }

  void project(std::vector<double>& x) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = std::clamp(x[j], lo[j], hi[j]);
    }
  }

  double projected_norm(const std::vector<double>& x,
                        const std::vector<double>& g) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double moved = std::clamp(x[j] - g[j], lo[j], hi[j]) - x[j];
      worst = std::max(worst, std::abs(moved));
    }
    return worst;
  }

  bool pinned(const std::vector<double>& x, const std::vector<double>& g,
              std::size_t j) const {
    return (x[j] <= lo[j] && g[j] > 0.0) || (x[j] >= hi[j] && g[j] < 0.0);
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Two-loop recursion restricted to the free variables.
std::vector<double> direction(const std::deque<Pair>& mem,
                              const std::vector<double>& g,
                              const std::vector<bool>& free) {
  const std::size_t n = g.size();
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = free[j] ? g[j] : 0.0;
  auto masked = [&](const std::vector<double>& v, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (free[j]) s += v[j] * w[j];
    }
    return s;
  };
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * masked(mem[k].s, q);
    for (std::size_t j = 0; j < n; ++j) {
      if (free[j]) q[j] -= alpha[k] * mem[k].y[j];
    }
  }
  if (!mem.empty()) {
    const Pair& last = mem.back();
    const double yy = masked(last.y, last.y);
    const double sy = masked(last.s, last.y);
    if (yy > 0.0 && sy > 0.0) {
      for (double& v : q) v *= sy / yy;
    }
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * masked(mem[k].y, q);
    for (std::size_t j = 0; j < n; ++j) {
      if (free[j]) q[j] += (alpha[k] - beta) * mem[k].s[j];
    }
  }
  for (double& v : q) v = -v;
  return q;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;
// Largest coordinate move of a steepest-descent trial step.
constexpr double kFirstStep = 0.1;

}  // namespace

double depot_radius_ceiling(const Instance& inst) {
  double top = inst.depot_radius_floor();
  for (const auto& s : inst.satellites) top = std::max(top, s.orbit.a());
  return top;
}

NlpResult minimize_placement(const DepotPlacement& initial,
                             const std::vector<Route>& routes,
                             const Instance& inst, const NlpOptions& options) {
  std::vector<RouteConstants> consts;
  std::vector<bool> used(initial.depots.size(), false);
  for (const Route& r : routes) {
    if (r.satellites.empty()) continue;
    consts.push_back(route_constants(r, inst));
    used.at(r.depot) = true;
  }

  Problem pb{&inst, &consts, initial, {}, {}, {}};
  std::vector<double> x;
  const double floor = inst.depot_radius_floor();
  const double ceiling = depot_radius_ceiling(inst);
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (!used[k]) continue;
    pb.active.push_back(static_cast<int>(k));
    const CircularOrbit& d = initial.depots[k];
    x.insert(x.end(), {d.a(), d.inclination(), d.raan()});
    pb.lo.insert(pb.lo.end(), {floor, 0.0, -kInf});
    pb.hi.insert(pb.hi.end(), {std::max(ceiling, d.a()), astro::kPi, kInf});
  }
  pb.project(x);

  NlpResult res;
  std::vector<double> g;
  double f = pb.eval(x, g);
  res.initial_objective = f;
  res.trace.push_back(f);

  std::deque<Pair> mem;
  const std::size_t n = x.size();
  res.exit = NlpExit::MaxIter;
  while (true) {
    const double pg = pb.projected_norm(x, g);
    res.grad_norm = pg;
    if (pg <= options.tol * std::max(1.0, std::abs(f))) {
      res.exit = NlpExit::Converged;
      break;
    }
    if (res.iterations >= options.max_iter) break;

    std::vector<bool> free(n);
    for (std::size_t j = 0; j < n; ++j) free[j] = !pb.pinned(x, g, j);

    bool found = false;
    std::vector<double> xn, gn;
    double fn = f;
    // Quasi-Newton direction first; on failure fall back to steepest descent.
    for (int attempt = 0; attempt < 2 && !found; ++attempt) {
      if (attempt == 1) {
        if (mem.empty()) break;
        mem.clear();
      }
      std::vector<double> d = direction(mem, g, free);
      double slope = dot(g, d);
      if (!(slope < 0.0)) {
        mem.clear();
        d = direction(mem, g, free);
        slope = dot(g, d);
        if (!(slope < 0.0)) break;
      }
      double step = 1.0;
      if (mem.empty()) {
        double big = 0.0;
        for (double v : d) big = std::max(big, std::abs(v));
        step = std::min(1.0, kFirstStep / big);
      }
      auto trial = [&](double t, std::vector<double>& xt,
                       std::vector<double>& gt, double& ft) {
        xt = x;
        for (std::size_t j = 0; j < n; ++j) xt[j] += t * d[j];
        pb.project(xt);
        std::vector<double> dx(n);
        for (std::size_t j = 0; j < n; ++j) dx[j] = xt[j] - x[j];
        ft = pb.eval(xt, gt);
        return ft <= f + kArmijo * dot(g, dx) && ft <= f;
      };
      for (int back = 0; back < 60; ++back, step *= 0.5) {
        if (trial(step, xn, gn, fn)) {
          found = true;
          break;
        }
      }
      if (!found) continue;
      // Expand while the curvature condition is unmet and Armijo still holds.
      for (int grow = 0; grow < 30; ++grow) {
        if (std::abs(dot(gn, d)) <= kCurvature * std::abs(slope)) break;
        if (dot(gn, d) > 0.0) break;
        std::vector<double> xt, gt;
        double ft;
        if (!trial(2.0 * step, xt, gt, ft) || ft >= fn) break;
        step *= 2.0;
        xn = std::move(xt);
        gn = std::move(gt);
        fn = ft;
      }
    }
    if (!found) {
      res.exit = NlpExit::LineSearchFail;
      break;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      p.s[j] = xn[j] - x[j];
      p.y[j] = gn[j] - g[j];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12 * dot(p.y, p.y)) {
      p.rho = 1.0 / sy;
      mem.push_back(std::move(p));
      if (static_cast<int>(mem.size()) > options.memory) mem.pop_front();
    }
    x = std::move(xn);
    g = std::move(gn);
    f = fn;
    ++res.iterations;
    res.trace.push_back(f);
  }

  res.objective = f;
  res.placement = pb.placement(x);
  for (auto& d : res.placement.depots) {
    d = CircularOrbit(d.a(), d.inclination(), d.raan());
  }
  return res;
}

double total_emleo(const DepotPlacement& placement,
                   const RoutingSolution& routing, const Instance& inst) {
  double total = 0.0;
  for (const Route& r : routing.routes) {
    if (r.satellites.empty()) continue;
    const model::MassProfile p = model::route_mass_profile(r, placement, inst);
    total += model::route_emleo(
        p, astro::emleo_factor(placement.depots.at(r.depot).a(), inst.r0,
                               inst.prop, inst.scale));
  }
  return total;
}

}  // namespace clrpod::locate

#include "clrpod/framework.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace clrpod::framework {

using astro::CircularOrbit;

namespace {

using Clock = std::chrono::steady_clock;
using Feature = std::array<double, 4>;

// Relative slack allowed in the monotone check; the routing and placement
// stages evaluate the same sum in different orders.
constexpr double kMonotoneSlack = 1e-9;

Feature feature(const CircularOrbit& o) {
  const double si = std::sin(o.inclination());
  return {o.a(), si * std::cos(o.raan()), si * std::sin(o.raan()),
          std::cos(o.inclination())};
}

double dist2(const Feature& x, const Feature& y) {
  double s = 0.0;
  for (int c = 0; c < 4; ++c) s += (x[c] - y[c]) * (x[c] - y[c]);
  return s;
}

CircularOrbit orbit_of(const Feature& f) {
  const double norm = std::sqrt(f[1] * f[1] + f[2] * f[2] + f[3] * f[3]);
  if (norm == 0.0) return CircularOrbit(f[0], 0.0, 0.0);
  const double i = std::acos(std::clamp(f[3] / norm, -1.0, 1.0));
  return CircularOrbit(f[0], i, std::atan2(f[2], f[1]));
}

double wrap_pi(double angle) {
  double w = astro::wrap_two_pi(angle);
  if (w > astro::kPi) w -= astro::kTwoPi;
  return w;
}

struct Clustering {
  std::vector<Feature> centers;
  double sse = std::numeric_limits<double>::infinity();
};

Clustering lloyd(const std::vector<Feature>& pts, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(pts.size());
  Clustering c;
  // k-means++ seeding.
  std::uniform_int_distribution<int> pick(0, n - 1);
  c.centers.push_back(pts[pick(rng)]);
  std::vector<double> near(n);
  while (static_cast<int>(c.centers.size()) < k) {
    double total = 0.0;
    for (int p = 0; p < n; ++p) {
      near[p] = std::numeric_limits<double>::infinity();
      for (const Feature& ctr : c.centers) {
        near[p] = std::min(near[p], dist2(pts[p], ctr));
      }
      total += near[p];
    }
    int chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        r -= near[chosen];
        if (r <= 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    c.centers.push_back(pts[chosen]);
  }

  std::vector<int> label(n, -1);
  for (int round = 0; round < 200; ++round) {
    bool changed = false;
    for (int p = 0; p < n; ++p) {
      int best = 0;
      for (int q = 1; q < k; ++q) {
        if (dist2(pts[p], c.centers[q]) < dist2(pts[p], c.centers[best])) best = q;
      }
      if (best != label[p]) {
        label[p] = best;
        changed = true;
      }
    }
    std::vector<Feature> sum(k, Feature{});
    std::vector<int> count(k, 0);
    for (int p = 0; p < n; ++p) {
      for (int d = 0; d < 4; ++d) sum[label[p]][d] += pts[p][d];
      ++count[label[p]];
    }
    for (int q = 0; q < k; ++q) {
      if (count[q] > 0) {
        for (int d = 0; d < 4; ++d) c.centers[q][d] = sum[q][d] / count[q];
        continue;
      }
      // Empty cluster: move it to the point farthest from its center.
      int far = 0;
      double worst = -1.0;
      for (int p = 0; p < n; ++p) {
        const double d = dist2(pts[p], c.centers[label[p]]);
        if (d > worst) {
          worst = d;
          far = p;
        }
      }
      c.centers[q] = pts[far];
      label[far] = q;
      changed = true;
    }
    if (!changed) break;
  }
  c.sse = 0.0;
  for (int p = 0; p < n; ++p) c.sse += dist2(pts[p], c.centers[label[p]]);
  return c;
}

std::optional<double> routes_objective(const std::vector<model::Route>& routes,
                                       const DepotPlacement& p,
                                       const Instance& inst) {
  RoutingSolution s;
  try {
    s = model::make_solution(routes, p, inst);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  if (!model::validate_solution(s, p, inst).empty()) return std::nullopt;
  return s.objective_emleo;
}

}  // namespace

void SolveConfig::validate() const {
  if (max_outer_iter < 0) throw std::invalid_argument("max_outer_iter must be >= 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (kmeans_restarts < 1) throw std::invalid_argument("kmeans_restarts must be >= 1");
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Converged: return "converged";
    case Outcome::MaxIterations: return "max-iterations";
    case Outcome::InfeasibleInitialGuess: return "infeasible-initial-guess";
  }
  return "unknown";
}

double SolveReport::reduction_pct() const {
  if (initial_emleo == 0.0) return 0.0;
  return 100.0 * (1.0 - final_emleo / initial_emleo);
}

bool SolveReport::monotone() const {
  for (std::size_t t = 1; t < objective_trace.size(); ++t) {
    const double prev = objective_trace[t - 1];
    if (objective_trace[t] > prev + kMonotoneSlack * std::max(1.0, std::abs(prev))) {
      return false;
    }
  }
  return true;
}

DepotPlacement kmeans_init(const Instance& inst, int k, std::uint64_t seed,
                           int restarts) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k > inst.n_t()) {
    throw std::invalid_argument("cannot seed " + std::to_string(k) +
                                " depots from " + std::to_string(inst.n_t()) +
                                " satellites");
  }
  std::vector<Feature> pts;
  for (const auto& s : inst.satellites) pts.push_back(feature(s.orbit));
  std::mt19937_64 rng(seed);
  Clustering best;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Clustering c = lloyd(pts, k, rng);
    if (c.sse < best.sse) best = std::move(c);
  }
  DepotPlacement p;
  for (const Feature& f : best.centers) p.depots.push_back(orbit_of(f));
  return p;
}

double placement_distance(const DepotPlacement& a, const DepotPlacement& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("placements have different depot counts");
  }
  double s = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    const CircularOrbit& x = a.depots[k];
    const CircularOrbit& y = b.depots[k];
    const double da = x.a() - y.a();
    const double di = x.inclination() - y.inclination();
    const double dr = wrap_pi(x.raan() - y.raan());
    s += da * da + di * di + dr * dr;
  }
  return std::sqrt(s);
}

DepotPlacement initial_placement(const Instance& inst,
                                 const SolveConfig& config) {
  if (!inst.depots_initial.empty()) return DepotPlacement{inst.depots_initial};
  return kmeans_init(inst, inst.n_d, config.seed, config.kmeans_restarts);
}

SolveReport alternate(const Instance& inst, const DepotPlacement& initial,
                      const SolveConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  auto since = [](Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  };

  SolveReport rep;
  rep.initial_placement = initial;
  DepotPlacement eta = initial;
  std::optional<RoutingSolution> routes;

  for (int t = 0;; ++t) {
    const auto ts = Clock::now();
    IterationRecord rec;
    rec.index = t;
    rec.placement = eta;

    const routing::MilpModel milp = routing::build_milp(inst, eta, config.milp);
    routing::BnbOptions bo;
    bo.time_limit_s = config.milp_time_limit_s;
    bo.route_search = config.route_search;
    bo.search = config.search;
    bo.search.seed = config.search.seed + config.seed * 1000003ULL + t;
    routing::BnbResult br =
        routing::solve_bnb(milp, routes ? &*routes : nullptr, bo);
    rec.milp_status = br.status;
    rec.milp_gap = br.gap();
    rec.milp_nodes = br.nodes;
    if (!br.incumbent && routes) {
      // Placement steps keep the previous routes feasible, so fall back to
      // them if the search came back empty.
      br.incumbent = model::make_solution(routes->routes, eta, inst);
    }
    if (!br.incumbent) {
      rec.wall_s = since(ts);
      rep.records.push_back(std::move(rec));
      if (config.on_iteration) config.on_iteration(rep.records.back());
      rep.outcome = Outcome::InfeasibleInitialGuess;
      rep.final_placement = eta;
      rep.wall_s = since(t0);
      return rep;
    }
    rec.routing = *br.incumbent;
    rec.routing_objective = rec.routing.objective_emleo;
    rep.objective_trace.push_back(rec.routing_objective);
    if (t == 0) rep.initial_emleo = rec.routing_objective;
    routes = rec.routing;

    if (t >= config.max_outer_iter) {
      rec.wall_s = since(ts);
      rep.records.push_back(std::move(rec));
      if (config.on_iteration) config.on_iteration(rep.records.back());
      rep.outcome = Outcome::MaxIterations;
      rep.final_placement = eta;
      rep.final_routing = routes;
      rep.final_emleo = routes->objective_emleo;
      break;
    }

    const locate::NlpResult nlp =
        locate::minimize_placement(eta, routes->routes, inst, config.nlp);
    DepotPlacement next = nlp.placement;
    std::optional<double> obj = routes_objective(routes->routes, next, inst);
    if (!obj || *obj > rec.routing_objective) {
      // Shorten the step until the routes fit under the launch cap again.
      rec.launch_backtrack = true;
      obj.reset();
      for (int h = 1; h <= 40 && !obj; ++h) {
        const double lam = std::ldexp(1.0, -h);
        DepotPlacement mid = eta;
        for (int k = 0; k < eta.size(); ++k) {
          const CircularOrbit& a = eta.depots[k];
          const CircularOrbit& b = nlp.placement.depots[k];
          mid.depots[k] = CircularOrbit(
              a.a() + lam * (b.a() - a.a()),
              a.inclination() + lam * (b.inclination() - a.inclination()),
              a.raan() + lam * wrap_pi(b.raan() - a.raan()));
        }
        auto o = routes_objective(routes->routes, mid, inst);
        if (o && *o <= rec.routing_objective) {
          next = mid;
          obj = o;
        }
      }
      if (!obj) {
        next = eta;
        obj = rec.routing_objective;
      }
    }
    rec.has_nlp = true;
    rec.placement_after = next;
    rec.nlp_objective = *obj;
    rec.nlp_exit = nlp.exit;
    rec.nlp_iterations = nlp.iterations;
    rec.step = placement_distance(next, eta);
    rec.wall_s = since(ts);
    rep.objective_trace.push_back(rec.nlp_objective);
    const bool converged = rec.step < config.tolerance;
    rep.records.push_back(std::move(rec));
    if (config.on_iteration) config.on_iteration(rep.records.back());

    if (converged) {
      rep.outcome = Outcome::Converged;
      rep.final_placement = next;
      rep.final_routing = model::make_solution(routes->routes, next, inst);
      rep.final_emleo = rep.final_routing->objective_emleo;
      break;
    }
    ++rep.iterations;
    eta = next;
  }
  rep.wall_s = since(t0);
  return rep;
}

}  // namespace clrpod::framework

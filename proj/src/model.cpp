#include "clrpod/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace clrpod::model {

namespace {

constexpr double kMassTol = 1e-6;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void Instance::validate() const {
  require(n_d >= 1, "n_d must be at least 1");
  require(n_v >= 1, "n_v must be at least 1");
  require(!satellites.empty(), "satellites: at least one satellite required");
  for (std::size_t j = 0; j < satellites.size(); ++j) {
    require(satellites[j].payload_kg >= 0.0,
            "satellites[" + std::to_string(j) + "].payload_kg must be >= 0");
  }
  require(static_cast<int>(servicer_dry_kg.size()) == n_d,
          "servicer dry mass must be given for every depot");
  require(static_cast<int>(depot_dry_kg.size()) == n_d,
          "depot dry mass must be given for every depot");
  for (int k = 0; k < n_d; ++k) {
    require(servicer_dry_kg[k] > 0.0, "servicer dry mass must be positive");
    require(depot_dry_kg[k] > 0.0, "depot dry mass must be positive");
    require(max_launch_kg > servicer_dry_kg[k] + depot_dry_kg[k],
            "max launch mass must exceed servicer plus depot dry mass");
  }
  require(r0 > 0.0, "r0 must be positive");
  require(r_min > 0.0, "r_min must be positive");
  require(depots_initial.empty() || static_cast<int>(depots_initial.size()) == n_d,
          "depots_initial must list exactly n_d orbits when present");
  prop.validate();
  scale.validate();
}

Instance mission_defaults(int n_d, int n_v) {
  Instance inst;
  inst.n_d = n_d;
  inst.n_v = n_v;
  inst.servicer_dry_kg.assign(n_d, 500.0);
  inst.depot_dry_kg.assign(n_d, 1500.0);
  inst.max_launch_kg = 12950.0;
  inst.r0 = inst.scale.to_du(7000.0);
  inst.r_min = inst.scale.to_du(7000.0);
  return inst;
}

std::vector<int> IndexSets::group(int depot) const {
  std::vector<int> g;
  for (int p = 0; p < n_v; ++p) g.push_back(depot + p * n_d);
  return g;
}

IndexSets build_index_sets(int n_d, int n_v, int n_t) {
  require(n_d > 0 && n_v > 0 && n_t > 0, "index-set counts must be positive");
  return IndexSets{n_d, n_v, n_t};
}

TransferTable build_transfer_table(const Instance& inst,
                                   const DepotPlacement& placement) {
  require(placement.size() == inst.n_d, "placement must have n_d depots");
  TransferTable t;
  t.n_d = inst.n_d;
  t.n_t = inst.n_t();
  const double isp = inst.prop.isp_servicer;
  auto ratio = [&](const CircularOrbit& a, const CircularOrbit& b) {
    return astro::mass_ratio(astro::edelbaum_dv(a, b), isp, inst.prop,
                             inst.scale);
  };
  t.sat_sat.assign(static_cast<std::size_t>(t.n_t) * t.n_t, 1.0);
  for (int i = 0; i < t.n_t; ++i) {
    for (int j = 0; j < t.n_t; ++j) {
      if (i != j) {
        t.sat_sat[i * t.n_t + j] =
            ratio(inst.satellites[i].orbit, inst.satellites[j].orbit);
      }
    }
  }
  t.depot_sat.resize(static_cast<std::size_t>(t.n_d) * t.n_t);
  t.sat_depot.resize(static_cast<std::size_t>(t.n_d) * t.n_t);
  t.phi.resize(t.n_d);
  for (int k = 0; k < t.n_d; ++k) {
    const CircularOrbit& d = placement.depots[k];
    t.phi[k] = astro::emleo_factor(d.a(), inst.r0, inst.prop, inst.scale);
    for (int j = 0; j < t.n_t; ++j) {
      t.depot_sat[k * t.n_t + j] = ratio(d, inst.satellites[j].orbit);
      t.sat_depot[k * t.n_t + j] = ratio(inst.satellites[j].orbit, d);
    }
  }
  return t;
}

namespace {

template <typename Ratio>
MassProfile propagate(const Route& route, const Instance& inst, Ratio&& ratio) {
  MassProfile p;
  const auto& seq = route.satellites;
  if (seq.empty()) return p;
  const double dry = inst.servicer_dry(route.depot);
  const int n = static_cast<int>(seq.size());
  p.u_after.resize(n);
  // Leg indices: -1 is the depot.
  double m = dry * ratio(seq[n - 1], -1);
  for (int idx = n - 1; idx >= 0; --idx) {
    p.u_after[idx] = m;
    const double payload = inst.satellites[seq[idx]].payload_kg;
    p.payload += payload;
    m = (m + payload) * ratio(idx == 0 ? -1 : seq[idx - 1], seq[idx]);
  }
  p.u_start = m;
  p.propellant = p.u_start - dry - p.payload;
  return p;
}

}  // namespace

MassProfile route_mass_profile(const Route& route,
                               const DepotPlacement& placement,
                               const Instance& inst) {
  const CircularOrbit& depot = placement.depots.at(route.depot);
  const double isp = inst.prop.isp_servicer;
  return propagate(route, inst, [&](int from, int to) {
    const CircularOrbit& a = from < 0 ? depot : inst.satellites[from].orbit;
    const CircularOrbit& b = to < 0 ? depot : inst.satellites[to].orbit;
    return astro::mass_ratio(astro::edelbaum_dv(a, b), isp, inst.prop,
                             inst.scale);
  });
}

MassProfile route_mass_profile(const Route& route, const TransferTable& table,
                               const Instance& inst) {
  return propagate(route, inst, [&](int from, int to) {
    if (from < 0) return table.departure(route.depot, to);
    if (to < 0) return table.arrival(route.depot, from);
    return table.between(from, to);
  });
}

double route_emleo(const MassProfile& profile, double phi) {
  return (profile.propellant + profile.payload) * phi;
}

RoutingSolution make_solution(std::vector<Route> routes,
                              const TransferTable& table,
                              const Instance& inst) {
  RoutingSolution sol;
  sol.u_start.assign(inst.n_start(), 0.0);
  sol.u_sat.assign(inst.n_t(), 0.0);
  std::vector<int> used(inst.n_d, 0);
  for (Route& r : routes) {
    if (r.satellites.empty()) continue;
    require(r.depot >= 0 && r.depot < inst.n_d, "route depot out of range");
    require(used[r.depot] < inst.n_v, "more routes than n_v at a depot");
    r.start_node = r.depot + used[r.depot] * inst.n_d;
    ++used[r.depot];
    const MassProfile p = route_mass_profile(r, table, inst);
    sol.u_start[r.start_node] = p.u_start;
    for (std::size_t idx = 0; idx < r.satellites.size(); ++idx) {
      sol.u_sat.at(r.satellites[idx]) = p.u_after[idx];
    }
    sol.objective_emleo += route_emleo(p, table.phi[r.depot]);
    sol.routes.push_back(std::move(r));
  }
  return sol;
}

RoutingSolution make_solution(std::vector<Route> routes,
                              const DepotPlacement& placement,
                              const Instance& inst) {
  return make_solution(std::move(routes), build_transfer_table(inst, placement),
                       inst);
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::Structure: return "structure";
    case Constraint::RouteUse: return "route-use-at-most-once";
    case Constraint::VisitOnce: return "visit-exactly-once";
    case Constraint::FlowContinuity: return "flow-continuity";
    case Constraint::MassPropagation: return "mass-propagation";
    case Constraint::LaunchMass: return "launch-mass-cap";
    case Constraint::NonNegative: return "non-negative-mass";
  }
  return "unknown";
}

double depot_launch_mass(const RoutingSolution& sol, int depot,
                         const TransferTable& table, const Instance& inst) {
  const IndexSets idx{inst.n_d, inst.n_v, inst.n_t()};
  const double dry = inst.servicer_dry(depot);
  double carried = 0.0;
  for (int p : idx.group(depot)) {
    bool used = false;
    for (const Route& r : sol.routes) {
      used = used || (r.start_node == p && !r.satellites.empty());
    }
    carried += sol.u_start.at(p) - (used ? dry : 0.0);
  }
  return (carried + dry + inst.depot_dry(depot)) * table.phi[depot];
}

std::vector<Violation> validate_solution(const RoutingSolution& sol,
                                         const DepotPlacement& placement,
                                         const Instance& inst) {
  std::vector<Violation> out;
  auto flag = [&](Constraint c, const std::string& msg) {
    out.push_back({c, msg});
  };
  const int n_t = inst.n_t();
  const IndexSets idx{inst.n_d, inst.n_v, n_t};

  if (static_cast<int>(sol.u_start.size()) != inst.n_start() ||
      static_cast<int>(sol.u_sat.size()) != n_t) {
    flag(Constraint::Structure, "node mass vectors have the wrong size");
    return out;
  }
  std::vector<int> start_uses(inst.n_start(), 0);
  std::vector<int> visits(n_t, 0);
  bool structural = true;
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const Route& route = sol.routes[r];
    const std::string tag = "route " + std::to_string(r);
    if (route.depot < 0 || route.depot >= inst.n_d || route.start_node < 0 ||
        route.start_node >= inst.n_start() ||
        idx.origin(route.start_node) != route.depot) {
      flag(Constraint::Structure, tag + ": start node does not belong to its depot");
      structural = false;
      continue;
    }
    if (!route.satellites.empty()) ++start_uses[route.start_node];
    std::vector<int> seen(n_t, 0);
    for (int s : route.satellites) {
      if (s < 0 || s >= n_t) {
        flag(Constraint::Structure, tag + ": satellite index out of range");
        structural = false;
        continue;
      }
      ++visits[s];
      if (++seen[s] > 1) {
        flag(Constraint::FlowContinuity,
             tag + ": satellite " + std::to_string(s) + " repeated within route");
      }
    }
  }
  for (int k = 0; k < inst.n_start(); ++k) {
    if (start_uses[k] > 1) {
      flag(Constraint::RouteUse,
           "start node " + std::to_string(k) + " used " +
               std::to_string(start_uses[k]) + " times");
    }
  }
  for (int j = 0; j < n_t; ++j) {
    if (visits[j] != 1) {
      flag(Constraint::VisitOnce, "satellite " + std::to_string(j) +
                                      " visited " + std::to_string(visits[j]) +
                                      " times");
    }
  }
  for (int k = 0; k < inst.n_start(); ++k) {
    if (sol.u_start[k] < -kMassTol) {
      flag(Constraint::NonNegative, "start node " + std::to_string(k));
    }
  }
  for (int j = 0; j < n_t; ++j) {
    if (sol.u_sat[j] < -kMassTol) {
      flag(Constraint::NonNegative, "satellite " + std::to_string(j));
    }
  }
  if (!structural) return out;

  const TransferTable table = build_transfer_table(inst, placement);
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const Route& route = sol.routes[r];
    const auto& seq = route.satellites;
    if (seq.empty()) continue;
    const double dry = inst.servicer_dry(route.depot);
    auto check = [&](double lhs, double rhs, const std::string& where) {
      if (lhs + kMassTol * std::max(1.0, std::abs(rhs)) < rhs) {
        std::ostringstream os;
        os << "route " << r << " " << where << ": " << lhs << " < " << rhs;
        flag(Constraint::MassPropagation, os.str());
      }
    };
    const int first = seq.front();
    check(sol.u_start[route.start_node],
          (sol.u_sat[first] + inst.satellites[first].payload_kg) *
              table.departure(route.depot, first),
          "departure");
    for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
      const int i = seq[n];
      const int j = seq[n + 1];
      check(sol.u_sat[i],
            (sol.u_sat[j] + inst.satellites[j].payload_kg) * table.between(i, j),
            "leg " + std::to_string(n + 1));
    }
    check(sol.u_sat[seq.back()], dry * table.arrival(route.depot, seq.back()),
          "return");
  }
  for (int k = 0; k < inst.n_d; ++k) {
    const double launched = depot_launch_mass(sol, k, table, inst);
    if (launched > inst.max_launch_kg + kMassTol) {
      std::ostringstream os;
      os << "depot " << k << " launch mass " << launched << " kg exceeds "
         << inst.max_launch_kg << " kg";
      flag(Constraint::LaunchMass, os.str());
    }
  }
  return out;
}

}  // namespace clrpod::model

#include "clrpod/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clrpod::oracle {

namespace {

using model::Route;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Choice {
  double cost = kInf;
  std::vector<Route> routes;
};

std::vector<std::vector<int>> key(const std::vector<Route>& routes) {
  std::vector<std::vector<int>> k;
  for (const Route& r : routes) {
    std::vector<int> row{r.depot};
    row.insert(row.end(), r.satellites.begin(), r.satellites.end());
    k.push_back(std::move(row));
  }
  std::sort(k.begin(), k.end());
  return k;
}

// Lower cost wins; equal costs go to fewer routes, then the
// lexicographically smaller route set.
bool better(const Choice& a, const Choice& b) {
  if (!std::isfinite(a.cost)) return false;
  if (!std::isfinite(b.cost)) return true;
  const double tol = 1e-9 * std::max(1.0, std::abs(b.cost));
  if (a.cost < b.cost - tol) return true;
  if (a.cost > b.cost + tol) return false;
  if (a.routes.size() != b.routes.size()) return a.routes.size() < b.routes.size();
  return key(a.routes) < key(b.routes);
}

Choice join(const Choice& a, const Choice& b) {
  Choice c;
  c.cost = a.cost + b.cost;
  c.routes = a.routes;
  c.routes.insert(c.routes.end(), b.routes.begin(), b.routes.end());
  return c;
}

}  // namespace

OracleResult enumerate_optimal(const model::Instance& inst,
                               const model::DepotPlacement& placement) {
  inst.validate();
  const int nt = inst.n_t();
  if (nt > kMaxSatellites) {
    throw std::invalid_argument("oracle refuses instances with more than " +
                                std::to_string(kMaxSatellites) + " satellites");
  }
  const int nd = inst.n_d;
  const int full = (1 << nt) - 1;
  const model::TransferTable table = model::build_transfer_table(inst, placement);
  OracleResult out;

  // Best single route per (depot, subset).
  std::vector<std::vector<Choice>> single(nd, std::vector<Choice>(full + 1));
  for (int d = 0; d < nd; ++d) {
    for (int s = 1; s <= full; ++s) {
      std::vector<int> order;
      for (int j = 0; j < nt; ++j) {
        if (s & (1 << j)) order.push_back(j);
      }
      do {
        Route r{d, d, order};
        const model::MassProfile p = model::route_mass_profile(r, table, inst);
        Choice c{model::route_emleo(p, table.phi[d]), {r}};
        ++out.evaluated;
        if (better(c, single[d][s])) single[d][s] = std::move(c);
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }

  // Split each depot's subset into at most n_v routes, then keep the
  // split only if the launch cap holds. The cap is monotone in the route
  // total, so checking the cheapest split is exact.
  std::vector<std::vector<Choice>> depot(nd, std::vector<Choice>(full + 1));
  for (int d = 0; d < nd; ++d) {
    std::vector<Choice> prev(full + 1);
    prev[0].cost = 0.0;
    for (int v = 0; v < inst.n_v; ++v) {
      std::vector<Choice> next = prev;
      for (int s = 1; s <= full; ++s) {
        const int low = s & -s;
        for (int t = s; t > 0; t = (t - 1) & s) {
          if (!(t & low) || !std::isfinite(prev[s ^ t].cost)) continue;
          Choice c = join(prev[s ^ t], single[d][t]);
          if (better(c, next[s])) next[s] = std::move(c);
        }
      }
      prev = std::move(next);
    }
    const double fixed =
        (inst.servicer_dry(d) + inst.depot_dry(d)) * table.phi[d];
    for (int s = 0; s <= full; ++s) {
      if (std::isfinite(prev[s].cost) &&
          prev[s].cost + fixed <= inst.max_launch_kg + 1e-6) {
        depot[d][s] = std::move(prev[s]);
      }
    }
  }

  std::vector<Choice> acc(full + 1);
  acc[0].cost = 0.0;
  for (int d = 0; d < nd; ++d) {
    std::vector<Choice> next(full + 1);
    for (int s = 0; s <= full; ++s) {
      for (int t = s;; t = (t - 1) & s) {
        if (std::isfinite(acc[s ^ t].cost) && std::isfinite(depot[d][t].cost)) {
          Choice c = join(acc[s ^ t], depot[d][t]);
          if (better(c, next[s])) next[s] = std::move(c);
        }
        if (t == 0) break;
      }
    }
    acc = std::move(next);
  }

  if (!std::isfinite(acc[full].cost)) {
    out.infeasible = true;
    return out;
  }
  out.routing = model::make_solution(acc[full].routes, table, inst);
  out.objective = out.routing->objective_emleo;
  return out;
}

}  // namespace clrpod::oracle

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "clrpod/routing.hpp"

namespace clrpod::routing {

namespace {

using Seq = std::vector<int>;

constexpr double kImprove = 1e-9;
// Launch-cap excess is priced far above any propellant saving.
constexpr double kExcessWeight = 100.0;

class Plan {
 public:
  Plan(const Instance& inst, const model::TransferTable& table)
      : inst_(&inst), table_(&table), routes_(inst.n_d), cost_(inst.n_d) {}

  double seq_cost(int d, const Seq& s) const {
    if (s.empty()) return 0.0;
    const int n = static_cast<int>(s.size());
    const double dry = inst_->servicer_dry(d);
    double m = dry * table_->arrival(d, s[n - 1]);
    double payload = 0.0;
    for (int idx = n - 1; idx >= 0; --idx) {
      const double pl = inst_->satellites[s[idx]].payload_kg;
      payload += pl;
      m = (m + pl) * (idx == 0 ? table_->departure(d, s[0])
                               : table_->between(s[idx - 1], s[idx]));
    }
    return (m - dry) * table_->phi[d];
  }

  double excess(int d, double route_sum) const {
    const double launched =
        route_sum + (inst_->servicer_dry(d) + inst_->depot_dry(d)) * table_->phi[d];
    return std::max(0.0, launched - inst_->max_launch_kg);
  }

  double depot_sum(int d) const {
    return std::accumulate(cost_[d].begin(), cost_[d].end(), 0.0);
  }

  double depot_value(int d, double route_sum) const {
    return route_sum + kExcessWeight * excess(d, route_sum);
  }

  double value() const {
    double v = 0.0;
    for (int d = 0; d < inst_->n_d; ++d) v += depot_value(d, depot_sum(d));
    return v;
  }

  bool feasible() const {
    for (int d = 0; d < inst_->n_d; ++d) {
      if (excess(d, depot_sum(d)) > 1e-9) return false;
    }
    return true;
  }

  double cost() const {
    double v = 0.0;
    for (int d = 0; d < inst_->n_d; ++d) v += depot_sum(d);
    return v;
  }

  void set(int d, int r, Seq s) {
    if (r == static_cast<int>(routes_[d].size())) {
      routes_[d].push_back({});
      cost_[d].push_back(0.0);
    }
    cost_[d][r] = seq_cost(d, s);
    routes_[d][r] = std::move(s);
  }

  void compact() {
    for (int d = 0; d < inst_->n_d; ++d) {
      for (int r = static_cast<int>(routes_[d].size()) - 1; r >= 0; --r) {
        if (routes_[d][r].empty()) {
          routes_[d].erase(routes_[d].begin() + r);
          cost_[d].erase(cost_[d].begin() + r);
        }
      }
    }
  }

  int n_routes(int d) const { return static_cast<int>(routes_[d].size()); }
  const Seq& route(int d, int r) const { return routes_[d][r]; }
  double route_cost(int d, int r) const { return cost_[d][r]; }

  /// Change in objective if routes (d1, r1) and (d2, r2) were replaced.
  /// r may equal n_routes(d) for a fresh route; (d2, r2) may be unused.
  double delta(int d1, int r1, double c1, int d2 = -1, int r2 = -1,
               double c2 = 0.0) const {
    auto old_cost = [&](int d, int r) {
      return r < n_routes(d) ? cost_[d][r] : 0.0;
    };
    if (d2 < 0) {
      const double before = depot_sum(d1);
      const double after = before - old_cost(d1, r1) + c1;
      return depot_value(d1, after) - depot_value(d1, before);
    }
    if (d1 == d2) {
      const double before = depot_sum(d1);
      const double after =
          before - old_cost(d1, r1) - old_cost(d2, r2) + c1 + c2;
      return depot_value(d1, after) - depot_value(d1, before);
    }
    const double b1 = depot_sum(d1);
    const double b2 = depot_sum(d2);
    const double a1 = b1 - old_cost(d1, r1) + c1;
    const double a2 = b2 - old_cost(d2, r2) + c2;
    return depot_value(d1, a1) - depot_value(d1, b1) + depot_value(d2, a2) -
           depot_value(d2, b2);
  }

  std::vector<Route> to_routes() const {
    std::vector<Route> out;
    for (int d = 0; d < inst_->n_d; ++d) {
      for (const Seq& s : routes_[d]) {
        if (!s.empty()) out.push_back({d, d, s});
      }
    }
    return out;
  }

  const Instance& inst() const { return *inst_; }

 private:
  const Instance* inst_;
  const model::TransferTable* table_;
  std::vector<std::vector<Seq>> routes_;
  std::vector<std::vector<double>> cost_;
};

bool try_relocate(Plan& p) {
  const int nd = p.inst().n_d;
  const int nv = p.inst().n_v;
  for (int d = 0; d < nd; ++d) {
    for (int r = 0; r < p.n_routes(d); ++r) {
      const Seq& src = p.route(d, r);
      for (int pos = 0; pos < static_cast<int>(src.size()); ++pos) {
        const int s = src[pos];
        Seq removed = src;
        removed.erase(removed.begin() + pos);
        const double c_removed = p.seq_cost(d, removed);
        for (int d2 = 0; d2 < nd; ++d2) {
          const int slots = std::min(p.n_routes(d2) + 1, nv);
          for (int r2 = 0; r2 < slots; ++r2) {
            const bool same = d2 == d && r2 == r;
            if (!same && r2 == p.n_routes(d2) && removed.empty() &&
                d2 == d) {
              continue;
            }
            const Seq& base = same ? removed
                              : r2 < p.n_routes(d2) ? p.route(d2, r2)
                                                    : Seq{};
            for (int pos2 = 0; pos2 <= static_cast<int>(base.size()); ++pos2) {
              if (same && pos2 == pos) continue;
              Seq ins = base;
              ins.insert(ins.begin() + pos2, s);
              const double c_ins = p.seq_cost(d2, ins);
              double dv;
              if (same) {
                dv = p.delta(d, r, c_ins);
              } else {
                dv = p.delta(d, r, c_removed, d2, r2, c_ins);
              }
              if (dv < -kImprove) {
                if (same) {
                  p.set(d, r, std::move(ins));
                } else {
                  p.set(d2, r2, std::move(ins));
                  p.set(d, r, std::move(removed));
                }
                p.compact();
                return true;
              }
            }
          }
        }
      }
    }
  }
  return false;
}

bool try_swap(Plan& p) {
  const int nd = p.inst().n_d;
  for (int d = 0; d < nd; ++d) {
    for (int r = 0; r < p.n_routes(d); ++r) {
      const int len = static_cast<int>(p.route(d, r).size());
      for (int a = 0; a < len; ++a) {
        for (int d2 = d; d2 < nd; ++d2) {
          for (int r2 = (d2 == d ? r : 0); r2 < p.n_routes(d2); ++r2) {
            const bool same = d2 == d && r2 == r;
            const int len2 = static_cast<int>(p.route(d2, r2).size());
            for (int b = same ? a + 1 : 0; b < len2; ++b) {
              if (same) {
                Seq s = p.route(d, r);
                std::swap(s[a], s[b]);
                const double c = p.seq_cost(d, s);
                if (p.delta(d, r, c) < -kImprove) {
                  p.set(d, r, std::move(s));
                  return true;
                }
              } else {
                Seq s1 = p.route(d, r);
                Seq s2 = p.route(d2, r2);
                std::swap(s1[a], s2[b]);
                const double c1 = p.seq_cost(d, s1);
                const double c2 = p.seq_cost(d2, s2);
                if (p.delta(d, r, c1, d2, r2, c2) < -kImprove) {
                  p.set(d, r, std::move(s1));
                  p.set(d2, r2, std::move(s2));
                  return true;
                }
              }
            }
          }
        }
      }
    }
  }
  return false;
}

bool try_two_opt(Plan& p) {
  for (int d = 0; d < p.inst().n_d; ++d) {
    for (int r = 0; r < p.n_routes(d); ++r) {
      const int len = static_cast<int>(p.route(d, r).size());
      for (int a = 0; a < len; ++a) {
        for (int b = a + 2; b <= len; ++b) {
          Seq s = p.route(d, r);
          std::reverse(s.begin() + a, s.begin() + b);
          const double c = p.seq_cost(d, s);
          if (p.delta(d, r, c) < -kImprove) {
            p.set(d, r, std::move(s));
            return true;
          }
        }
      }
    }
  }
  return false;
}

// Moves a block of 2 or 3 consecutive satellites, optionally reversed.
bool try_or_opt(Plan& p) {
  const int nd = p.inst().n_d;
  const int nv = p.inst().n_v;
  for (int d = 0; d < nd; ++d) {
    for (int r = 0; r < p.n_routes(d); ++r) {
      const Seq& src = p.route(d, r);
      const int len = static_cast<int>(src.size());
      for (int seg = 2; seg <= 3; ++seg) {
        for (int a = 0; a + seg <= len; ++a) {
          Seq block(src.begin() + a, src.begin() + a + seg);
          Seq removed = src;
          removed.erase(removed.begin() + a, removed.begin() + a + seg);
          const double c_removed = p.seq_cost(d, removed);
          for (int d2 = 0; d2 < nd; ++d2) {
            const int slots = std::min(p.n_routes(d2) + 1, nv);
            for (int r2 = 0; r2 < slots; ++r2) {
              const bool same = d2 == d && r2 == r;
              const Seq& base = same ? removed
                                : r2 < p.n_routes(d2) ? p.route(d2, r2)
                                                      : Seq{};
              for (int pos2 = 0; pos2 <= static_cast<int>(base.size()); ++pos2) {
                for (int rev = 0; rev < 2; ++rev) {
                  if (same && pos2 == a && rev == 0) continue;
                  Seq ins = base;
                  if (rev) {
                    ins.insert(ins.begin() + pos2, block.rbegin(), block.rend());
                  } else {
                    ins.insert(ins.begin() + pos2, block.begin(), block.end());
                  }
                  const double c_ins = p.seq_cost(d2, ins);
                  const double dv =
                      same ? p.delta(d, r, c_ins)
                           : p.delta(d, r, c_removed, d2, r2, c_ins);
                  if (dv < -kImprove) {
                    if (same) {
                      p.set(d, r, std::move(ins));
                    } else {
                      p.set(d2, r2, std::move(ins));
                      p.set(d, r, std::move(removed));
                    }
                    p.compact();
                    return true;
                  }
                }
              }
            }
          }
        }
      }
    }
  }
  return false;
}

// Exchanges route tails between two routes.
bool try_tail_exchange(Plan& p) {
  const int nd = p.inst().n_d;
  for (int d = 0; d < nd; ++d) {
    for (int r = 0; r < p.n_routes(d); ++r) {
      for (int d2 = d; d2 < nd; ++d2) {
        for (int r2 = (d2 == d ? r + 1 : 0); r2 < p.n_routes(d2); ++r2) {
          const Seq& x = p.route(d, r);
          const Seq& y = p.route(d2, r2);
          for (int a = 0; a <= static_cast<int>(x.size()); ++a) {
            for (int b = 0; b <= static_cast<int>(y.size()); ++b) {
              if ((a == 0 && b == 0) ||
                  (a == static_cast<int>(x.size()) &&
                   b == static_cast<int>(y.size()))) {
                continue;
              }
              Seq s1(x.begin(), x.begin() + a);
              s1.insert(s1.end(), y.begin() + b, y.end());
              Seq s2(y.begin(), y.begin() + b);
              s2.insert(s2.end(), x.begin() + a, x.end());
              const double c1 = p.seq_cost(d, s1);
              const double c2 = p.seq_cost(d2, s2);
              if (p.delta(d, r, c1, d2, r2, c2) < -kImprove) {
                p.set(d, r, std::move(s1));
                p.set(d2, r2, std::move(s2));
                p.compact();
                return true;
              }
            }
          }
        }
      }
    }
  }
  return false;
}

void local_search(Plan& p) {
  while (try_relocate(p) || try_swap(p) || try_two_opt(p) || try_or_opt(p) ||
         try_tail_exchange(p)) {
  }
}

// Cheapest feasible-first insertion of each satellite, in the given order.
void recreate(Plan& p, const std::vector<int>& order) {
  const int nd = p.inst().n_d;
  const int nv = p.inst().n_v;
  for (int s : order) {
    double best = lp::kInf;
    int bd = -1, br = -1, bpos = -1;
    for (int d = 0; d < nd; ++d) {
      const int slots = std::min(p.n_routes(d) + 1, nv);
      for (int r = 0; r < slots; ++r) {
        const Seq base = r < p.n_routes(d) ? p.route(d, r) : Seq{};
        for (int pos = 0; pos <= static_cast<int>(base.size()); ++pos) {
          Seq ins = base;
          ins.insert(ins.begin() + pos, s);
          const double dv = p.delta(d, r, p.seq_cost(d, ins));
          if (dv < best) {
            best = dv;
            bd = d;
            br = r;
            bpos = pos;
          }
        }
      }
    }
    Seq ins = br < p.n_routes(bd) ? p.route(bd, br) : Seq{};
    ins.insert(ins.begin() + bpos, s);
    p.set(bd, br, std::move(ins));
  }
}

Plan from_routes(const Instance& inst, const model::TransferTable& table,
                 const std::vector<Route>& routes) {
  Plan p(inst, table);
  std::vector<int> used(inst.n_d, 0);
  std::vector<char> seen(inst.n_t(), 0);
  std::vector<int> missing;
  for (const Route& r : routes) {
    if (r.satellites.empty() || r.depot < 0 || r.depot >= inst.n_d ||
        used[r.depot] >= inst.n_v) {
      continue;
    }
    Seq s;
    for (int j : r.satellites) {
      if (j >= 0 && j < inst.n_t() && !seen[j]) {
        seen[j] = 1;
        s.push_back(j);
      }
    }
    if (s.empty()) continue;
    p.set(r.depot, used[r.depot]++, std::move(s));
  }
  for (int j = 0; j < inst.n_t(); ++j) {
    if (!seen[j]) missing.push_back(j);
  }
  recreate(p, missing);
  return p;
}

}  // namespace

std::optional<std::vector<Route>> search_routes(
    const Instance& inst, const model::TransferTable& table,
    const SearchOptions& options, const std::vector<Route>* seed_routes) {
  const int nt = inst.n_t();
  std::mt19937_64 rng(options.seed);
  std::optional<Plan> best;
  double best_cost = lp::kInf;
  auto consider = [&](const Plan& p) {
    if (p.feasible() && p.cost() < best_cost - kImprove) {
      best_cost = p.cost();
      best = p;
    }
  };

  for (int start = 0; start < std::max(1, options.starts); ++start) {
    std::vector<int> order(nt);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Plan cur(inst, table);
    if (start == 0 && seed_routes != nullptr) {
      cur = from_routes(inst, table, *seed_routes);
    } else if (start % 2 == 0) {
      // Round-robin spread over every route slot.
      std::vector<Seq> slots(static_cast<std::size_t>(inst.n_d) * inst.n_v);
      for (int idx = 0; idx < nt; ++idx) {
        slots[idx % slots.size()].push_back(order[idx]);
      }
      std::vector<int> used(inst.n_d, 0);
      for (std::size_t q = 0; q < slots.size(); ++q) {
        if (slots[q].empty()) continue;
        const int d = static_cast<int>(q % inst.n_d);
        cur.set(d, used[d]++, std::move(slots[q]));
      }
    } else {
      recreate(cur, order);
    }
    local_search(cur);
    consider(cur);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < options.rounds; ++round) {
      Plan trial = cur;
      const int lo = std::min(2, nt);
      const int hi = std::max(lo, std::min(nt, std::max(3, nt / 3)));
      const int q = lo + static_cast<int>(unit(rng) * (hi - lo + 1)) % (hi - lo + 1);
      std::vector<int> pick(nt);
      std::iota(pick.begin(), pick.end(), 0);
      std::shuffle(pick.begin(), pick.end(), rng);
      pick.resize(q);
      std::vector<char> drop(nt, 0);
      for (int s : pick) drop[s] = 1;
      for (int d = 0; d < inst.n_d; ++d) {
        for (int r = 0; r < trial.n_routes(d); ++r) {
          Seq s;
          for (int j : trial.route(d, r)) {
            if (!drop[j]) s.push_back(j);
          }
          trial.set(d, r, std::move(s));
        }
      }
      trial.compact();
      recreate(trial, pick);
      local_search(trial);
      consider(trial);
      const double tv = trial.value();
      const double cv = cur.value();
      if (tv < cv - kImprove || unit(rng) < 0.05 ||
          (tv < cv * 1.002 && unit(rng) < 0.5)) {
        cur = std::move(trial);
      }
    }
  }
  if (!best) return std::nullopt;
  return best->to_routes();
}

}  // namespace clrpod::routing

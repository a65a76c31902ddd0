#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <vector>

#include "clrpod/routing.hpp"

namespace clrpod::routing {

const char* to_string(BnbStatus s) {
  switch (s) {
    case BnbStatus::Optimal: return "optimal";
    case BnbStatus::FeasibleTimeLimit: return "feasible-time-limit";
    case BnbStatus::Infeasible: return "infeasible";
    case BnbStatus::NoIncumbent: return "no-incumbent";
  }
  return "unknown";
}

double BnbResult::gap() const {
  if (!incumbent) return lp::kInf;
  const double inc = incumbent->objective_emleo;
  return std::max(0.0, inc - best_bound) / std::max(1.0, std::abs(inc));
}

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kRelGap = 1e-9;

using Clock = std::chrono::steady_clock;

struct Node {
  double bound = -lp::kInf;
  long id = 0;
  long parent = -1;
  std::vector<std::pair<int, std::uint8_t>> fixes;
  std::shared_ptr<const lp::Basis> basis;
};

// Open nodes searched depth first: the newest node is taken next, so the
// search keeps diving from a warm tableau and an incumbent prunes early.
class OpenNodes {
 public:
  bool empty() const { return nodes_.empty(); }
  void push(Node n) { nodes_.push_back(std::move(n)); }
  Node pop() {
    Node n = std::move(nodes_.back());
    nodes_.pop_back();
    return n;
  }
  double min_bound(double cap) const {
    for (const Node& n : nodes_) cap = std::min(cap, n.bound);
    return cap;
  }

 private:
  std::vector<Node> nodes_;
};

double prune_tol(double inc) { return kRelGap * std::max(1.0, std::abs(inc)); }

}  // namespace

BnbResult solve_bnb(const MilpModel& m, const RoutingSolution* warm,
                    const BnbOptions& options) {
  const auto t0 = Clock::now();
  const bool timed = options.time_limit_s > 0.0;
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  const Instance& inst = m.inst;
  BnbResult res;
  double inc_obj = lp::kInf;

  auto offer = [&](std::vector<Route> routes) -> std::optional<double> {
    RoutingSolution s;
    try {
      s = model::make_solution(std::move(routes), m.table, inst);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
    if (!model::validate_solution(s, m.placement, inst).empty()) {
      return std::nullopt;
    }
    const double obj = s.objective_emleo;
    if (obj < inc_obj - prune_tol(obj) * 1e-3) {
      inc_obj = obj;
      res.incumbent = std::move(s);
      res.incumbent_trace.push_back(obj);
    }
    return obj;
  };

  // Warm start: masses are recomputed under this placement, so only the
  // launch cap can reject it.
  if (warm != nullptr) res.warm_objective = offer(warm->routes);
  if (options.route_search) {
    const std::vector<Route>* seed = warm != nullptr ? &warm->routes : nullptr;
    if (auto found = search_routes(inst, m.table, options.search, seed)) {
      offer(std::move(*found));
    }
  }

  const int nb = m.num_binaries();
  auto lps = std::make_unique<lp::DualSimplex>(m.lp);
  std::optional<Clock::time_point> deadline;
  if (timed) {
    deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(options.time_limit_s));
  }
  lps->set_deadline(deadline);
  std::vector<double> cur_lo(m.lp.lower.begin(), m.lp.lower.begin() + nb);
  std::vector<double> cur_hi(m.lp.upper.begin(), m.lp.upper.begin() + nb);

  OpenNodes open;
  long next_id = 0;
  open.push(Node{-lp::kInf, next_id++, -1, {}, nullptr});
  long last_solved = -1;
  bool proven = true;
  bool timed_out = false;

  auto apply = [&](lp::DualSimplex& s, const Node& node) {
    std::vector<double> lo(m.lp.lower.begin(), m.lp.lower.begin() + nb);
    std::vector<double> hi(m.lp.upper.begin(), m.lp.upper.begin() + nb);
    for (auto [var, val] : node.fixes) {
      lo[var] = val;
      hi[var] = val;
    }
    for (int j = 0; j < nb; ++j) {
      if (lo[j] != cur_lo[j] || hi[j] != cur_hi[j]) {
        s.set_bounds(j, lo[j], hi[j]);
        cur_lo[j] = lo[j];
        cur_hi[j] = hi[j];
      }
    }
  };

  while (!open.empty()) {
    if (timed && elapsed() >= options.time_limit_s) {
      timed_out = true;
      break;
    }
    Node node = open.pop();
    if (node.bound >= inc_obj - prune_tol(inc_obj)) continue;

    apply(*lps, node);
    if (node.basis && node.parent != last_solved) lps->restore(*node.basis);
    lp::LpResult lr = lps->solve();
    if (lr.status != lp::LpStatus::Optimal &&
        lr.status != lp::LpStatus::Infeasible &&
        lr.status != lp::LpStatus::TimeLimit) {
      // One retry from a fresh factorization before giving up on the node.
      lps = std::make_unique<lp::DualSimplex>(m.lp);
      lps->set_deadline(deadline);
      cur_lo.assign(m.lp.lower.begin(), m.lp.lower.begin() + nb);
      cur_hi.assign(m.lp.upper.begin(), m.lp.upper.begin() + nb);
      apply(*lps, node);
      lr = lps->solve();
    }
    if (lr.status == lp::LpStatus::TimeLimit) {
      open.push(std::move(node));
      timed_out = true;
      break;
    }
    ++res.nodes;
    last_solved = node.id;
    if (lr.status == lp::LpStatus::Infeasible) continue;
    if (lr.status != lp::LpStatus::Optimal) {
      proven = false;
      continue;
    }
    if (lr.objective >= inc_obj - prune_tol(inc_obj)) continue;

    int branch = -1;
    double most = kIntTol;
    for (int j = 0; j < nb; ++j) {
      const double f = lr.x[j] - std::floor(lr.x[j]);
      const double frac = std::min(f, 1.0 - f);
      if (frac > most + 1e-12) {
        most = frac;
        branch = j;
      }
    }
    auto basis = std::make_shared<const lp::Basis>(lps->basis());
    if (branch < 0) {
      Decoded dec = decode(m, lr.x);
      if (dec.cycles.empty()) {
        offer(std::move(dec.routes));
        continue;
      }
      // A detached cycle: every solution drops at least one of its arcs.
      for (int var : dec.cycles.front()) {
        Node child{lr.objective, next_id++, node.id, node.fixes, basis};
        child.fixes.emplace_back(var, 0);
        open.push(std::move(child));
      }
      continue;
    }
    Node down{lr.objective, next_id++, node.id, node.fixes, basis};
    down.fixes.emplace_back(branch, 0);
    Node up{lr.objective, next_id++, node.id, std::move(node.fixes), basis};
    up.fixes.emplace_back(branch, 1);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  res.lp_pivots = lps->total_pivots();
  res.elapsed_s = elapsed();
  const bool exhausted = open.empty() && !timed_out && proven;
  if (res.incumbent) {
    if (exhausted) {
      res.status = BnbStatus::Optimal;
      res.best_bound = inc_obj;
    } else {
      res.status = BnbStatus::FeasibleTimeLimit;
      res.best_bound = open.min_bound(inc_obj);
    }
  } else {
    res.status = exhausted ? BnbStatus::Infeasible : BnbStatus::NoIncumbent;
  }
  return res;
}

}  // namespace clrpod::routing

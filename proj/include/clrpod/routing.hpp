#pragma once

// Fixed-placement routing MILP: model construction, a primal route search
// used for warm starts, and branch-and-bound over dual simplex relaxations.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clrpod/lp.hpp"
#include "clrpod/model.hpp"

namespace clrpod::routing {

using model::DepotPlacement;
using model::Instance;
using model::Route;
using model::RoutingSolution;

struct MilpOptions {
  /// Arc mass-flow inequalities that tighten the relaxation. They cut no
  /// integer solution; turning them off leaves the plain big-M model.
  bool flow_cuts = true;
};

enum class RowRole : std::uint8_t {
  RouteUse,
  VisitOnce,
  FlowContinuity,
  StartMass,
  TransferMass,
  ReturnMass,
  LaunchMass,
  Symmetry,
  FlowLink,
  FlowBalance,
  FlowCover,
};

std::string to_string(RowRole r);

struct MilpCounts {
  long binaries = 0;
  /// u at start nodes and satellites.
  long masses = 0;
  /// Arc mass-flow columns (zero without flow cuts).
  long auxiliary = 0;
  long rows = 0;
};

/// Closed-form sizes for (n_d, n_v, n_t).
MilpCounts closed_form_counts(int n_d, int n_v, int n_t, bool flow_cuts);

struct MilpModel {
  Instance inst;
  DepotPlacement placement;
  model::TransferTable table;
  model::IndexSets sets;
  MilpOptions options;
  lp::LinearProgram lp;
  std::vector<RowRole> role;
  /// Big-M used by each row (0 for rows without one).
  std::vector<double> big_m;
  /// Upper bound on u at each start node from the launch cap.
  std::vector<double> start_cap;
  /// Lower bound on u at each satellite from the cheapest way home.
  std::vector<double> sat_floor;
  MilpCounts counts;

  int n_t() const { return sets.n_t; }
  int n_start() const { return sets.n_d * sets.n_v; }
  int block() const { return n_t() * (n_t() + 1); }

  int zs(int k, int j) const { return k * block() + j; }
  int zx(int k, int i, int j) const {
    return k * block() + n_t() + i * (n_t() - 1) + (j < i ? j : j - 1);
  }
  int ze(int k, int i) const { return k * block() + n_t() * n_t() + i; }
  int u_start(int k) const { return n_start() * block() + k; }
  int u_sat(int i) const { return n_start() * block() + n_start() + i; }
  int ys(int k, int j) const {
    return n_start() * block() + n_start() + n_t() + k * n_t() + j;
  }
  int yx(int i, int j) const {
    return n_start() * block() + n_start() + n_t() + n_start() * n_t() +
           i * (n_t() - 1) + (j < i ? j : j - 1);
  }
  int num_binaries() const { return n_start() * block(); }
  bool is_binary(int var) const { return var < num_binaries(); }

  double largest_big_m() const;
  std::string var_name(int var) const;
};

/// Throws std::invalid_argument for a depot below r_min or a placement of
/// the wrong size.
MilpModel build_milp(const Instance& inst, const DepotPlacement& placement,
                     const MilpOptions& options = {});

/// One row per line: role, name, terms, bounds, big-M.
void dump_model(const MilpModel& model, std::ostream& out);

/// Column vector of a routing solution in the model's variable layout.
std::vector<double> encode(const MilpModel& model, const RoutingSolution& sol);

/// Routes read off an integral point. Closed satellite cycles that are not
/// attached to a start node are returned separately as variable lists.
struct Decoded {
  std::vector<Route> routes;
  std::vector<std::vector<int>> cycles;
};
Decoded decode(const MilpModel& model, const std::vector<double>& x);

struct SearchOptions {
  std::uint64_t seed = 1;
  int starts = 24;
  /// Ruin-and-recreate rounds per start.
  int rounds = 120;
};

/// Multi-start local search over route sets. Deterministic in the seed.
/// Returns the best launch-feasible routing found, if any.
std::optional<std::vector<Route>> search_routes(
    const Instance& inst, const model::TransferTable& table,
    const SearchOptions& options,
    const std::vector<Route>* seed_routes = nullptr);

enum class BnbStatus { Optimal, FeasibleTimeLimit, Infeasible, NoIncumbent };

const char* to_string(BnbStatus s);

struct BnbOptions {
  /// Wall-clock limit; non-positive means none.
  double time_limit_s = 100.0;
  bool route_search = true;
  SearchOptions search;
};

struct BnbResult {
  BnbStatus status = BnbStatus::NoIncumbent;
  std::optional<RoutingSolution> incumbent;
  double best_bound = -lp::kInf;
  long nodes = 0;
  long lp_pivots = 0;
  double elapsed_s = 0.0;
  /// Objective of the warm start after repair, if it survived.
  std::optional<double> warm_objective;
  /// Incumbent objective each time it improved, in order.
  std::vector<double> incumbent_trace;

  double gap() const;
};

BnbResult solve_bnb(const MilpModel& model, const RoutingSolution* warm,
                    const BnbOptions& options = {});

}  // namespace clrpod::routing

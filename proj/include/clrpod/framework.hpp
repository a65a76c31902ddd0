#pragma once

// Alternating solution of the routing MILP and the placement NLP, seeded
// by k-means over satellite orbits.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "clrpod/locate.hpp"
#include "clrpod/model.hpp"
#include "clrpod/routing.hpp"

namespace clrpod::framework {

using model::DepotPlacement;
using model::Instance;
using model::RoutingSolution;

struct IterationRecord;

struct SolveConfig {
  /// Routing/placement pairs after the initial routing; 0 evaluates the
  /// initial guess only.
  int max_outer_iter = 20;
  /// Placement change below which the alternation stops (canonical norm).
  double tolerance = 1e-6;
  /// Per routing solve; non-positive means none.
  double milp_time_limit_s = 100.0;
  std::uint64_t seed = 1;
  int kmeans_restarts = 10;
  routing::MilpOptions milp;
  bool route_search = true;
  routing::SearchOptions search;
  locate::NlpOptions nlp;
  /// Called after every record is complete, for progress output.
  std::function<void(const IterationRecord&)> on_iteration;

  /// Throws std::invalid_argument on non-positive settings.
  void validate() const;
};

enum class Outcome { Converged, MaxIterations, InfeasibleInitialGuess };

const char* to_string(Outcome o);

/// One routing solve and, except on the last record of a capped run or an
/// infeasible start, the placement solve that follows it.
struct IterationRecord {
  /// 0 is the routing at the initial guess.
  int index = 0;
  /// Placement the routing was solved under.
  DepotPlacement placement;
  RoutingSolution routing;
  double routing_objective = 0.0;
  routing::BnbStatus milp_status = routing::BnbStatus::NoIncumbent;
  double milp_gap = 0.0;
  long milp_nodes = 0;
  bool has_nlp = false;
  DepotPlacement placement_after;
  double nlp_objective = 0.0;
  locate::NlpExit nlp_exit = locate::NlpExit::Converged;
  int nlp_iterations = 0;
  /// Placement step shortened to keep the routes under the launch cap.
  bool launch_backtrack = false;
  double step = 0.0;
  double wall_s = 0.0;
};

struct SolveReport {
  Outcome outcome = Outcome::InfeasibleInitialGuess;
  DepotPlacement initial_placement;
  DepotPlacement final_placement;
  std::optional<RoutingSolution> final_routing;
  std::vector<IterationRecord> records;
  /// Placement updates that moved the depots by at least the tolerance.
  int iterations = 0;
  double initial_emleo = 0.0;
  double final_emleo = 0.0;
  double wall_s = 0.0;
  /// Objective after every routing and placement stage, in order.
  std::vector<double> objective_trace;

  double reduction_pct() const;
  /// Whether objective_trace never increases beyond roundoff.
  bool monotone() const;
};

/// k-means on (a, orbit normal) with k-means++ seeding; the best of
/// `restarts` runs by within-cluster sum of squares. Throws
/// std::invalid_argument when k exceeds the satellite count.
DepotPlacement kmeans_init(const Instance& inst, int k, std::uint64_t seed,
                           int restarts = 10);

/// Euclidean norm over (a, i, shortest raan difference). Throws
/// std::invalid_argument on depot count mismatch.
double placement_distance(const DepotPlacement& a, const DepotPlacement& b);

SolveReport alternate(const Instance& inst, const DepotPlacement& initial,
                      const SolveConfig& config);

/// Depots from the instance, or k-means when it lists none.
DepotPlacement initial_placement(const Instance& inst,
                                 const SolveConfig& config);

}  // namespace clrpod::framework

#pragma once

// Result files of a solve (CSV tables plus a JSON summary) and the RAAN
// sensitivity sweep over a solved placement.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "clrpod/framework.hpp"

namespace clrpod::report {

using framework::SolveReport;
using model::DepotPlacement;
using model::Instance;
using model::RoutingSolution;

/// iter, routing and post-placement totals, solver statuses, timing.
std::string iterations_csv(const SolveReport& rep);
/// depot, a_km, i_deg, raan_deg.
std::string depots_csv(const Instance& inst, const DepotPlacement& p);
/// depot, route_ordinal, satellites (0-based, space separated),
/// propellant_kg, emleo_kg.
std::string routes_csv(const Instance& inst, const DepotPlacement& p,
                       const RoutingSolution& routing);

nlohmann::json summary_json(const Instance& inst, const SolveReport& rep);

/// Writes iterations.csv, depots.csv, routes.csv and summary.json.
void write_solve_outputs(const std::filesystem::path& dir, const Instance& inst,
                         const SolveReport& rep);

struct Solved {
  DepotPlacement placement;
  std::vector<model::Route> routes;
  double total_emleo_kg = 0.0;
};

/// Final placement and routes from a summary.json. Throws
/// io::FormatError on a malformed or mismatched summary.
Solved read_summary(const std::filesystem::path& path, const Instance& inst);

struct SweepRow {
  double offset_deg = 0.0;
  double total_emleo_kg = 0.0;
  /// Percent change from the unshifted total.
  double change_pct = 0.0;
  /// Whether the routes still fit under the launch cap.
  bool launch_ok = true;
};

/// Shifts one depot's RAAN over [-span, span] in `steps` evenly spaced
/// offsets (made odd so 0 is included) and re-prices every leg with the
/// routes fixed. Throws std::invalid_argument for a bad depot index.
std::vector<SweepRow> sweep_raan(const Instance& inst,
                                 const DepotPlacement& placement,
                                 const std::vector<model::Route>& routes,
                                 int depot, double span_deg, int steps);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace clrpod::report

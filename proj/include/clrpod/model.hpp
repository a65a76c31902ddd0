#pragma once

#include <string>
#include <vector>

#include "clrpod/astro.hpp"

namespace clrpod::model {

using astro::CanonicalScale;
using astro::CircularOrbit;
using astro::PropulsionParams;

struct Satellite {
  CircularOrbit orbit;
  double payload_kg = 0.0;
};

/// Full problem input. Orbits and radii are canonical (DU, radians);
/// masses are kg.
struct Instance {
  std::vector<Satellite> satellites;
  /// Optional initial depot orbits; empty means "seed by clustering".
  std::vector<CircularOrbit> depots_initial;
  int n_d = 1;
  int n_v = 1;
  /// Per-depot servicer and depot dry masses (size n_d).
  std::vector<double> servicer_dry_kg;
  std::vector<double> depot_dry_kg;
  double max_launch_kg = 12950.0;
  double r0 = 1.0;
  double r_min = 1.0;
  PropulsionParams prop;
  CanonicalScale scale;

  int n_t() const { return static_cast<int>(satellites.size()); }
  int n_start() const { return n_d * n_v; }
  double servicer_dry(int depot) const { return servicer_dry_kg.at(depot); }
  double depot_dry(int depot) const { return depot_dry_kg.at(depot); }

  /// Lower bound on depot radius actually enforced: the EMLEO factor is
  /// only defined at or above r0.
  double depot_radius_floor() const { return r_min > r0 ? r_min : r0; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Default mission parameters with an empty satellite list, n_d = 1.
Instance mission_defaults(int n_d = 1, int n_v = 2);

/// Start-node bookkeeping for original/virtual depots. Node ids are laid
/// out as [original | virtual | end | satellite].
struct IndexSets {
  int n_d = 0;
  int n_v = 0;
  int n_t = 0;

  int d0_begin() const { return 0; }
  int d0_end() const { return n_d; }
  int dv_begin() const { return n_d; }
  int dv_end() const { return n_d * n_v; }
  int ds_begin() const { return 0; }
  int ds_end() const { return n_d * n_v; }
  int de_begin() const { return n_d * n_v; }
  int de_end() const { return n_d * (n_v + 1); }
  int t_begin() const { return n_d * (n_v + 1); }
  int t_end() const { return n_d * (n_v + 1) + n_t; }

  /// Original depot of a start node.
  int origin(int start) const { return start % n_d; }
  /// End node paired with a start node.
  int end_node(int start) const { return n_d * n_v + start % n_d; }
  /// Start nodes (original first, then virtual copies) of an original depot.
  std::vector<int> group(int depot) const;
};

/// Throws std::invalid_argument on non-positive counts.
IndexSets build_index_sets(int n_d, int n_v, int n_t);

/// Ordered servicing trip from one depot. start_node is the start-node id
/// in [0, n_d * n_v) and satisfies start_node % n_d == depot.
struct Route {
  int depot = 0;
  int start_node = 0;
  std::vector<int> satellites;

  bool operator==(const Route&) const = default;
};

struct RoutingSolution {
  std::vector<Route> routes;
  /// Mass before departure at each start node (0 when unused).
  std::vector<double> u_start;
  /// Servicer mass after deploying the payload at each satellite.
  std::vector<double> u_sat;
  /// Total propellant-and-payload EMLEO, kg.
  double objective_emleo = 0.0;
};

/// Depot orbital elements, one orbit per original depot.
struct DepotPlacement {
  std::vector<CircularOrbit> depots;

  int size() const { return static_cast<int>(depots.size()); }
};

/// Rocket-equation mass ratios for every edge family under a fixed
/// placement, plus the EMLEO factor of each depot.
struct TransferTable {
  int n_d = 0;
  int n_t = 0;
  std::vector<double> sat_sat;     // [i * n_t + j]
  std::vector<double> depot_sat;   // [k * n_t + j]
  std::vector<double> sat_depot;   // [k * n_t + i], from i back to depot k
  std::vector<double> phi;         // per depot

  double between(int i, int j) const { return sat_sat[i * n_t + j]; }
  double departure(int k, int j) const { return depot_sat[k * n_t + j]; }
  double arrival(int k, int i) const { return sat_depot[k * n_t + i]; }
};

/// Throws if a depot lies below the virtual orbit r0.
TransferTable build_transfer_table(const Instance& inst,
                                   const DepotPlacement& placement);

struct MassProfile {
  double u_start = 0.0;
  /// Mass after each deployment, in route order.
  std::vector<double> u_after;
  /// Propellant burned on the whole trip.
  double propellant = 0.0;
  /// Payload delivered on the trip.
  double payload = 0.0;
};

/// Backward rocket-equation propagation from the servicer dry mass at
/// route end. An empty route never departs and carries zero mass.
MassProfile route_mass_profile(const Route& route,
                               const DepotPlacement& placement,
                               const Instance& inst);

/// Same propagation through a precomputed table.
MassProfile route_mass_profile(const Route& route, const TransferTable& table,
                               const Instance& inst);

/// (propellant + payload) * phi of one route; the per-route term of the
/// EMLEO objective.
double route_emleo(const MassProfile& profile, double phi);

/// Assigns start nodes depot by depot (original first), fills the node
/// masses from exact profiles and evaluates the objective.
RoutingSolution make_solution(std::vector<Route> routes,
                              const DepotPlacement& placement,
                              const Instance& inst);
RoutingSolution make_solution(std::vector<Route> routes,
                              const TransferTable& table, const Instance& inst);

enum class Constraint {
  Structure,
  RouteUse,
  VisitOnce,
  FlowContinuity,
  MassPropagation,
  LaunchMass,
  NonNegative,
};

std::string to_string(Constraint c);

struct Violation {
  Constraint constraint;
  std::string detail;
};

/// Re-checks every routing constraint numerically (tolerance 1e-6 kg).
std::vector<Violation> validate_solution(const RoutingSolution& sol,
                                         const DepotPlacement& placement,
                                         const Instance& inst);

/// Total dry-plus-delivered mass launched for one depot, in EMLEO kg,
/// from the start-node masses.
double depot_launch_mass(const RoutingSolution& sol, int depot,
                         const TransferTable& table, const Instance& inst);

}  // namespace clrpod::model

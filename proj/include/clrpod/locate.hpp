#pragma once

// Depot-placement subproblem: with routes fixed, only the first and last
// leg of each route and the depot's EMLEO factor depend on the depot
// elements, so the objective and its gradient are cheap closed forms.

#include <vector>

#include "clrpod/model.hpp"

namespace clrpod::locate {

using model::DepotPlacement;
using model::Instance;
using model::Route;
using model::RoutingSolution;

/// Depot-independent part of a route. Start mass is e1 * (A * e_ret + B)
/// with e1, e_ret the mass ratios of the depot legs.
struct RouteConstants {
  int depot = 0;
  double A = 0.0;
  double B = 0.0;
  /// Servicer dry mass plus delivered payload.
  double C = 0.0;
  int first = 0;
  int last = 0;
  /// Summed dv of the legs between satellites, DU/TU.
  double interior_dv = 0.0;
};

/// Throws std::invalid_argument for an empty route.
RouteConstants route_constants(const Route& route, const Instance& inst);

/// Start mass of the route for a depot at `depot`.
double start_mass(const RouteConstants& rc, const model::CircularOrbit& depot,
                  const Instance& inst);

/// Propellant burned on the route for a depot at `depot`.
double route_propellant(const RouteConstants& rc,
                        const model::CircularOrbit& depot,
                        const Instance& inst);

struct Objective {
  double value = 0.0;
  /// One block per depot; blocks of depots without routes are zero.
  std::vector<astro::OrbitGradient> grad;
};

/// Total EMLEO of the fixed routes and its gradient in (a, i, raan) of
/// every depot.
Objective objective_and_grad(const DepotPlacement& placement,
                             const std::vector<RouteConstants>& routes,
                             const Instance& inst);

enum class NlpExit { Converged, MaxIter, LineSearchFail };

const char* to_string(NlpExit e);

struct NlpOptions {
  int max_iter = 500;
  /// Stored correction pairs.
  int memory = 10;
  /// Projected-gradient infinity norm, relative to max(1, |J|).
  double tol = 1e-8;
};

struct NlpResult {
  DepotPlacement placement;
  double objective = 0.0;
  double initial_objective = 0.0;
  /// Projected-gradient infinity norm at exit.
  double grad_norm = 0.0;
  int iterations = 0;
  NlpExit exit = NlpExit::Converged;
  /// Objective after each accepted iterate, starting with the initial point.
  std::vector<double> trace;
};

/// Largest depot radius the search may use: the outermost satellite, or the
/// floor if that is higher. Past the saturated plane-change branch of the
/// transfer model a depot would otherwise drift outward without limit.
double depot_radius_ceiling(const Instance& inst);

/// Projected limited-memory quasi-Newton over a between the depot radius
/// floor and ceiling (or the starting radius, if higher) and i in [0, pi].
/// RAAN is free during the search and wrapped on output.
/// Depots without routes keep their elements.
NlpResult minimize_placement(const DepotPlacement& initial,
                             const std::vector<Route>& routes,
                             const Instance& inst,
                             const NlpOptions& options = {});

/// Sum over routes of (propellant + payload) * phi under `placement`.
double total_emleo(const DepotPlacement& placement,
                   const RoutingSolution& routing, const Instance& inst);

}  // namespace clrpod::locate

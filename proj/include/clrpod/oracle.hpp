#pragma once

// Exhaustive fixed-placement routing for tiny instances: every assignment
// of satellites to depot route slots and every visiting order.

#include <optional>

#include "clrpod/model.hpp"

namespace clrpod::oracle {

inline constexpr int kMaxSatellites = 7;

struct OracleResult {
  std::optional<model::RoutingSolution> routing;
  double objective = 0.0;
  /// Ordered routes priced.
  long evaluated = 0;
  bool infeasible = false;
};

/// Throws std::invalid_argument when n_t exceeds kMaxSatellites.
OracleResult enumerate_optimal(const model::Instance& inst,
                               const model::DepotPlacement& placement);

}  // namespace clrpod::oracle

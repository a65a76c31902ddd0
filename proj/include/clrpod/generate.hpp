#pragma once

#include <cstdint>

#include "clrpod/model.hpp"

namespace clrpod::generate {

inline constexpr double kMinRadiusKm = 7000.0;
inline constexpr double kMaxRadiusKm = 42164.0;

/// Default mission parameters with n_t satellites drawn uniformly in radius
/// [7000, 42164] km, inclination [0, 180] deg and RAAN [0, 360) deg,
/// 100 kg payload each. No initial depots. Deterministic in the seed.
model::Instance random_instance(int n_d, int n_t, std::uint64_t seed,
                                int n_v = 2);

/// Depot orbits drawn from the same ranges, for routing-only tests.
model::DepotPlacement random_placement(const model::Instance& inst,
                                       std::uint64_t seed);

}  // namespace clrpod::generate

#include "clrpod/generate.hpp"

#include <random>
#include <stdexcept>

#include "clrpod/astro.hpp"

namespace clrpod::generate {

namespace {

astro::CircularOrbit draw(std::mt19937_64& rng, const astro::CanonicalScale& sc) {
  std::uniform_real_distribution<double> a(kMinRadiusKm, kMaxRadiusKm);
  std::uniform_real_distribution<double> inc(0.0, astro::kPi);
  std::uniform_real_distribution<double> raan(0.0, astro::kTwoPi);
  const double a_km = a(rng);
  const double i = inc(rng);
  const double o = raan(rng);
  return {sc.to_du(a_km), i, o};
}

}  // namespace

model::Instance random_instance(int n_d, int n_t, std::uint64_t seed, int n_v) {
  if (n_d < 1 || n_t < 1 || n_v < 1) {
    throw std::invalid_argument("instance counts must be positive");
  }
  model::Instance inst = model::mission_defaults(n_d, n_v);
  std::mt19937_64 rng(seed);
  for (int j = 0; j < n_t; ++j) {
    inst.satellites.push_back({draw(rng, inst.scale), 100.0});
  }
  return inst;
}

model::DepotPlacement random_placement(const model::Instance& inst,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  model::DepotPlacement p;
  for (int k = 0; k < inst.n_d; ++k) p.depots.push_back(draw(rng, inst.scale));
  return p;
}

}  // namespace clrpod::generate

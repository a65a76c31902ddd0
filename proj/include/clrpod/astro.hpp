#pragma once

// Analytic astrodynamics kernel for circular orbits in canonical units
// (mu = 1 DU^3/TU^2). Low-thrust transfers use the Edelbaum closed form,
// depot delivery uses a two-burn Hohmann split between launcher and depot.

#include <numbers>
#include <utility>

namespace clrpod::astro {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tilt angles above this (radians) saturate the Edelbaum plane change.
inline constexpr double kTiltSaturation = 2.0;
/// |sin(tilt)| below this is treated as coplanar/antiparallel for gradients.
inline constexpr double kTiltGuard = 1e-9;
/// Transfer dv (DU/TU) below this yields a zero gradient.
inline constexpr double kDvGuard = 1e-9;

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double angle);

/// Circular orbit: semimajor axis (DU), inclination and RAAN (radians).
class CircularOrbit {
 public:
  CircularOrbit() = default;
  /// Throws std::invalid_argument for a <= 0 or i outside [0, pi].
  /// RAAN is normalized into [0, 2*pi).
  CircularOrbit(double a, double inclination, double raan);

  /// Builds an orbit without normalizing RAAN (optimizer iterates keep
  /// an unwrapped RAAN); still validates a and i.
  static CircularOrbit unwrapped(double a, double inclination, double raan);

  double a() const { return a_; }
  double inclination() const { return i_; }
  double raan() const { return raan_; }

  bool operator==(const CircularOrbit&) const = default;

 private:
  double a_ = 1.0;
  double i_ = 0.0;
  double raan_ = 0.0;
};

struct CanonicalScale {
  double du_km = 26560.0;
  double mu_km3s2 = 398600.4418;

  /// Velocity unit in m/s (sqrt(mu/DU), km/s -> m/s).
  double velocity_unit_mps() const;
  double to_du(double km) const { return km / du_km; }
  double to_km(double du) const { return du * du_km; }
  void validate() const;
};

struct PropulsionParams {
  double isp_launch = 457.0;
  double isp_depot = 320.0;
  double isp_servicer = 1790.0;
  double g0 = 9.81;

  void validate() const;
};

/// Partial derivatives with respect to (a, i, raan) of one orbit.
struct OrbitGradient {
  double d_da = 0.0;
  double d_di = 0.0;
  double d_draan = 0.0;

  OrbitGradient& operator+=(const OrbitGradient& o) {
    d_da += o.d_da;
    d_di += o.d_di;
    d_draan += o.d_draan;
    return *this;
  }
  friend OrbitGradient operator*(double s, OrbitGradient g) {
    g.d_da *= s;
    g.d_di *= s;
    g.d_draan *= s;
    return g;
  }
};

/// Circular velocity sqrt(1/a) in DU/TU.
double circular_velocity(double a);

/// Cosine of the angle between the two orbit normals (unclamped).
double tilt_cosine(const CircularOrbit& o1, const CircularOrbit& o2);

/// Angle between orbital planes, in [0, pi].
double tilt_angle(const CircularOrbit& o1, const CircularOrbit& o2);

/// Gradient of the tilt angle with respect to the first (depot) orbit.
/// Zero beyond the saturation angle and at coplanar/antiparallel planes.
OrbitGradient tilt_angle_grad(const CircularOrbit& depot,
                              const CircularOrbit& target);

/// Edelbaum low-thrust dv between circular orbits, DU/TU.
double edelbaum_dv(const CircularOrbit& o1, const CircularOrbit& o2);

/// Gradient of edelbaum_dv with respect to the depot orbit.
OrbitGradient edelbaum_dv_grad(const CircularOrbit& depot,
                               const CircularOrbit& target);

/// Launcher and depot burns (DU/TU) of the Hohmann delivery from the
/// virtual orbit r0 to radius a. Throws for a < r0 or r0 <= 0.
std::pair<double, double> launch_deploy_dv(double a, double r0);

/// Effective-mass-to-LEO conversion factor of a depot at radius a.
double emleo_factor(double a, double r0, const PropulsionParams& prop,
                    const CanonicalScale& scale);

/// d(emleo_factor)/da, per DU. Inclination and RAAN partials are zero.
double emleo_factor_grad(double a, double r0, const PropulsionParams& prop,
                         const CanonicalScale& scale);

/// Rocket-equation mass ratio exp(dv / (g0 * isp)) for a canonical dv.
double mass_ratio(double dv_canonical, double isp, const PropulsionParams& prop,
                  const CanonicalScale& scale);

}  // namespace clrpod::astro

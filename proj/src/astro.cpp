#include "clrpod/astro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace clrpod::astro {

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2*pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

namespace {

void check_elements(double a, double inclination) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("semimajor axis must be positive, got " +
                                std::to_string(a));
  }
  if (!(inclination >= 0.0 && inclination <= kPi)) {
    throw std::invalid_argument("inclination must lie in [0, pi], got " +
                                std::to_string(inclination));
  }
}

}  // namespace

CircularOrbit::CircularOrbit(double a, double inclination, double raan)
    : a_(a), i_(inclination), raan_(wrap_two_pi(raan)) {
  check_elements(a, inclination);
  if (!std::isfinite(raan)) throw std::invalid_argument("RAAN must be finite");
}

CircularOrbit CircularOrbit::unwrapped(double a, double inclination,
                                       double raan) {
  check_elements(a, inclination);
  if (!std::isfinite(raan)) throw std::invalid_argument("RAAN must be finite");
  CircularOrbit o;
  o.a_ = a;
  o.i_ = inclination;
  o.raan_ = raan;
  return o;
}

double CanonicalScale::velocity_unit_mps() const {
  return std::sqrt(mu_km3s2 / du_km) * 1000.0;
}

void CanonicalScale::validate() const {
  if (!(du_km > 0.0)) throw std::invalid_argument("du_km must be positive");
  if (!(mu_km3s2 > 0.0)) throw std::invalid_argument("mu_km3s2 must be positive");
}

void PropulsionParams::validate() const {
  if (!(isp_launch > 0.0) || !(isp_depot > 0.0) || !(isp_servicer > 0.0)) {
    throw std::invalid_argument("specific impulses must be positive");
  }
  if (!(g0 > 0.0)) throw std::invalid_argument("g0 must be positive");
}

double circular_velocity(double a) { return 1.0 / std::sqrt(a); }

double tilt_cosine(const CircularOrbit& o1, const CircularOrbit& o2) {
  return std::sin(o1.inclination()) * std::sin(o2.inclination()) *
             std::cos(o1.raan() - o2.raan()) +
         std::cos(o1.inclination()) * std::cos(o2.inclination());
}

namespace {

// Sine and cosine of the tilt from the orbit normals; the cross product
// keeps small angles accurate where acos of the dot product would not.
std::pair<double, double> tilt_sin_cos(const CircularOrbit& o1,
                                       const CircularOrbit& o2) {
  const double s1 = std::sin(o1.inclination());
  const double s2 = std::sin(o2.inclination());
  const double n1[3] = {s1 * std::sin(o1.raan()), -s1 * std::cos(o1.raan()),
                        std::cos(o1.inclination())};
  const double n2[3] = {s2 * std::sin(o2.raan()), -s2 * std::cos(o2.raan()),
                        std::cos(o2.inclination())};
  const double cx = n1[1] * n2[2] - n1[2] * n2[1];
  const double cy = n1[2] * n2[0] - n1[0] * n2[2];
  const double cz = n1[0] * n2[1] - n1[1] * n2[0];
  return {std::sqrt(cx * cx + cy * cy + cz * cz),
          n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2]};
}

}  // namespace

double tilt_angle(const CircularOrbit& o1, const CircularOrbit& o2) {
  const auto [s, c] = tilt_sin_cos(o1, o2);
  return std::atan2(s, c);
}

OrbitGradient tilt_angle_grad(const CircularOrbit& depot,
                              const CircularOrbit& target) {
  const auto [s, c] = tilt_sin_cos(depot, target);
  const double theta = std::atan2(s, c);
  if (theta > kTiltSaturation || s < kTiltGuard) return {};

  const double i = depot.inclination();
  const double it = target.inclination();
  const double dr = depot.raan() - target.raan();
  OrbitGradient g;
  g.d_di = -(std::cos(i) * std::sin(it) * std::cos(dr) -
             std::sin(i) * std::cos(it)) /
           s;
  g.d_draan = std::sin(i) * std::sin(it) * std::sin(dr) / s;
  return g;
}

double edelbaum_dv(const CircularOrbit& o1, const CircularOrbit& o2) {
  const double v1 = circular_velocity(o1.a());
  const double v2 = circular_velocity(o2.a());
  const double theta = tilt_angle(o1, o2);
  if (theta > kTiltSaturation) return v1 + v2;
  // v1^2 + v2^2 - 2 v1 v2 cos(x) without the cancellation for close orbits.
  const double s = std::sin(0.25 * kPi * theta);
  return std::sqrt((v1 - v2) * (v1 - v2) + 4.0 * v1 * v2 * s * s);
}

OrbitGradient edelbaum_dv_grad(const CircularOrbit& depot,
                               const CircularOrbit& target) {
  const double dv = edelbaum_dv(depot, target);
  if (dv < kDvGuard) return {};

  const double a = depot.a();
  const double at = target.a();
  const double theta = tilt_angle(depot, target);
  const double arg = 0.5 * kPi * std::min(theta, kTiltSaturation);

  OrbitGradient g;
  g.d_da = (-1.0 / (a * a) + std::cos(arg) / std::sqrt(a * a * a * at)) /
           (2.0 * dv);
  if (theta <= kTiltSaturation) {
    const OrbitGradient dtheta = tilt_angle_grad(depot, target);
    const double k = std::sin(arg) * 0.5 * kPi / (dv * std::sqrt(a * at));
    g.d_di = k * dtheta.d_di;
    g.d_draan = k * dtheta.d_draan;
  }
  return g;
}

std::pair<double, double> launch_deploy_dv(double a, double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  if (a < r0) {
    throw std::invalid_argument("depot radius " + std::to_string(a) +
                                " DU lies below the virtual orbit " +
                                std::to_string(r0) + " DU");
  }
  const double launch =
      std::sqrt(2.0 / r0 - 2.0 / (a + r0)) - std::sqrt(1.0 / r0);
  const double deploy =
      std::sqrt(1.0 / a) - std::sqrt(2.0 / a - 2.0 / (a + r0));
  // Both burns are exactly zero at a == r0 up to rounding.
  return {std::max(launch, 0.0), std::max(deploy, 0.0)};
}

double emleo_factor(double a, double r0, const PropulsionParams& prop,
                    const CanonicalScale& scale) {
  const auto [launch, deploy] = launch_deploy_dv(a, r0);
  const double vu = scale.velocity_unit_mps();
  return std::exp(launch * vu / (prop.g0 * prop.isp_launch)) *
         std::exp(deploy * vu / (prop.g0 * prop.isp_depot));
}

double emleo_factor_grad(double a, double r0, const PropulsionParams& prop,
                         const CanonicalScale& scale) {
  const double phi = emleo_factor(a, r0, prop, scale);
  const double vu = scale.velocity_unit_mps();
  const double s = a + r0;
  const double launch_root = std::sqrt(2.0 / r0 - 2.0 / s);
  const double deploy_root = std::sqrt(2.0 / a - 2.0 / s);
  const double d_launch = 1.0 / (s * s * launch_root);
  const double d_deploy = -0.5 / (a * std::sqrt(a)) -
                          (-1.0 / (a * a) + 1.0 / (s * s)) / deploy_root;
  return phi * vu *
         (d_deploy / (prop.g0 * prop.isp_depot) +
          d_launch / (prop.g0 * prop.isp_launch));
}

double mass_ratio(double dv_canonical, double isp, const PropulsionParams& prop,
                  const CanonicalScale& scale) {
  return std::exp(dv_canonical * scale.velocity_unit_mps() / (prop.g0 * isp));
}

}  // namespace clrpod::astro

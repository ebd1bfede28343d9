#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/fit.hpp"
#include "eitlab/susceptibility.hpp"

namespace eitlab {

// tau_g = -d phi / d omega_p of the fitted model phase, in seconds.
inline double group_delay(const SusceptibilityModel& model, double omega_p) noexcept {
  return -phase_slope(model, omega_p);
}

inline double group_delay(const FitResult& fit, double omega_p) {
  return group_delay(fit.model, omega_p);
}

inline double group_velocity(double tau_g, double length_m) {
  if (tau_g == 0.0) throw ZeroDelay("group_velocity: zero group delay");
  return length_m / tau_g;
}

struct DelayPoint {
  double omega_p = 0.0;
  double tau_g = 0.0;
};

inline std::vector<DelayPoint> group_delay_table(const SusceptibilityModel& model,
                                                 std::span<const double> omega_grid) {
  std::vector<DelayPoint> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) out.push_back({w, group_delay(model, w)});
  return out;
}

struct WindowCenter {
  double omega_p = 0.0;
  double tau_g = 0.0;
};

// Point of largest |tau_g| within +-Gamma_- of the narrow (second) line,
// sampled on `samples` points.
inline WindowCenter suppression_window_center(const SusceptibilityModel& model, int samples = 2001) {
  const double c = model.second.center;
  const double half = model.second.width;
  WindowCenter best{c, group_delay(model, c)};
  for (int i = 0; i < samples; ++i) {
    const double w = c - half + 2.0 * half * i / (samples - 1);
    const double t = group_delay(model, w);
    if (std::abs(t) > std::abs(best.tau_g)) best = {w, t};
  }
  return best;
}

}  // namespace eitlab

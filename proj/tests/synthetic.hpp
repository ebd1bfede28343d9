#pragma once

// Synthetic spectra shared by the fit, discrimination and acceptance tests.

#include <vector>

#include "eitlab/spectrum.hpp"
#include "eitlab/susceptibility.hpp"
#include "eitlab/units.hpp"

namespace synth {

using namespace eitlab;

// Line widths of a few MHz on a half-meter effective line: the baseline
// phase slope across the sweep is large enough that L_eff is identified,
// and feature depths stay near half a neper.
inline constexpr double kCenterGhz = 6.485;
inline constexpr double kWidthMhz = 5.0;
inline constexpr double kLeff = 0.5;
inline constexpr int kPoints = 201;

inline double center() { return units::ghz_2pi(kCenterGhz); }
inline double width() { return units::mhz_2pi(kWidthMhz); }
inline BaselineParams baseline() { return {kLeff, 0.5, 0.3}; }

// Magnitude giving a peak Im(chi) that changes ln|S21| by `depth` nepers.
inline double amplitude_for_depth(double depth, double line_width) {
  const double kappa = center() * kLeff / (2.0 * BaselineParams::c);
  return depth / kappa * 0.5 * line_width;
}

inline SusceptibilityModel eit_model() {
  const double g = width();
  return make_eit({amplitude_for_depth(0.5, g), center(), g}, {amplitude_for_depth(0.3, 0.15 * g), center(), 0.15 * g},
                  baseline(), Polarity::transmission);
}

inline SusceptibilityModel ats_model() {
  const double g = width();
  return make_ats({amplitude_for_depth(0.5, 0.7 * g), center() - 1.2 * g, 0.7 * g},
                  {amplitude_for_depth(0.4, 0.9 * g), center() + 1.2 * g, 0.9 * g}, baseline(),
                  Polarity::absorption);
}

inline std::vector<double> grid(int n = kPoints, double half_span_widths = 5.0) {
  std::vector<double> w(static_cast<std::size_t>(n));
  const double lo = center() - half_span_widths * width(), hi = center() + half_span_widths * width();
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return w;
}

inline ComplexSpectrum spectrum(const SusceptibilityModel& m, const std::vector<double>& omega) {
  std::vector<SpectrumPoint> pts;
  for (double w : omega) {
    const cplx l = eval_ln_s21(m, w);
    SpectrumPoint p;
    p.omega_p = w;
    p.s21 = std::exp(l);
    p.phase = l.imag();
    pts.push_back(p);
  }
  return ComplexSpectrum(std::move(pts));
}

inline ComplexSpectrum baseline_only(const std::vector<double>& omega) {
  std::vector<SpectrumPoint> pts;
  for (double w : omega) {
    const cplx l = ln_transmission(w, 0.0, baseline());
    SpectrumPoint p;
    p.omega_p = w;
    p.s21 = std::exp(l);
    p.phase = l.imag();
    pts.push_back(p);
  }
  return ComplexSpectrum(std::move(pts));
}

}  // namespace synth

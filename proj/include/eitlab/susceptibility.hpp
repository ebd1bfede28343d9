#pragma once

// Two-Lorentzian susceptibility models and their mapping onto the complex
// logarithm of the transmission coefficient:
//
//   ln S21 = i (w L / c) (1 + chi / 2) - alpha0 + i phi0
//
// EIT: chi = A+ / ((w - w+) - i G+/2) - A- / ((w - w-) - i G-/2)
// ATS: chi = A1 / ((w - w1) - i G1/2) + A2 / ((w - w2) - i G2/2)
//
// Magnitudes are non-negative; the overall feature orientation (absorption
// dip vs. transmission peak of the broad line) is a separate discrete sign.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <tuple>

#include "eitlab/errors.hpp"
#include "eitlab/units.hpp"

namespace eitlab {

using cplx = std::complex<double>;

struct BaselineParams {
  double l_eff = 0.01;  // meters
  double alpha0 = 0.0;
  double phi0 = 0.0;

  static constexpr double c = units::speed_of_light;
};

enum class ModelKind { eit, ats };

inline std::string_view to_string(ModelKind k) noexcept { return k == ModelKind::eit ? "EIT" : "ATS"; }

inline ModelKind model_kind_from_string(std::string_view s) {
  if (s == "EIT" || s == "eit") return ModelKind::eit;
  if (s == "ATS" || s == "ats") return ModelKind::ats;
  throw InvalidArgument("unknown model tag '" + std::string(s) + "'");
}

// +1: the broad line lowers |S21| (absorption). -1: it raises |S21|, as for a
// resonator measured in transmission.
enum class Polarity : int { absorption = 1, transmission = -1 };

inline double sign_of(Polarity p) noexcept { return static_cast<double>(static_cast<int>(p)); }

struct Lorentzian {
  double amplitude = 0.0;  // rad/s
  double center = 0.0;     // rad/s
  double width = 1.0;      // rad/s, full width

  cplx response(double omega) const noexcept {
    return amplitude / cplx(omega - center, -0.5 * width);
  }
  // d/d omega of response
  cplx slope(double omega) const noexcept {
    const cplx d(omega - center, -0.5 * width);
    return -amplitude / (d * d);
  }

  friend bool operator==(const Lorentzian&, const Lorentzian&) = default;
};

struct SusceptibilityModel {
  ModelKind kind = ModelKind::eit;
  Lorentzian first;   // EIT: (A+, w+, G+); ATS: (A1, w1, G1)
  Lorentzian second;  // EIT: (A-, w-, G-); ATS: (A2, w2, G2)
  Polarity polarity = Polarity::absorption;
  BaselineParams baseline;

  double second_sign() const noexcept { return kind == ModelKind::eit ? -1.0 : 1.0; }

  void validate() const {
    if (!(first.width > 0.0) || !(second.width > 0.0))
      throw InvalidArgument("susceptibility model: widths must be positive");
    if (!(first.amplitude >= 0.0) || !(second.amplitude >= 0.0))
      throw InvalidArgument("susceptibility model: magnitudes must be non-negative");
    if (!(baseline.l_eff > 0.0)) throw InvalidArgument("baseline: L_eff must be positive");
  }
};

inline SusceptibilityModel make_eit(Lorentzian plus, Lorentzian minus, BaselineParams baseline,
                                    Polarity polarity = Polarity::absorption) {
  return {ModelKind::eit, plus, minus, polarity, baseline};
}

// ATS terms are stored in canonical order (center, then magnitude, then width).
inline SusceptibilityModel canonical_ats(SusceptibilityModel m) noexcept {
  if (m.kind != ModelKind::ats) return m;
  auto key = [](const Lorentzian& l) { return std::tie(l.center, l.amplitude, l.width); };
  if (key(m.second) < key(m.first)) std::swap(m.first, m.second);
  return m;
}

inline SusceptibilityModel make_ats(Lorentzian one, Lorentzian two, BaselineParams baseline,
                                    Polarity polarity = Polarity::absorption) {
  return canonical_ats({ModelKind::ats, one, two, polarity, baseline});
}

inline cplx eval_susceptibility(const SusceptibilityModel& m, double omega_p) noexcept {
  return sign_of(m.polarity) *
         (m.first.response(omega_p) + m.second_sign() * m.second.response(omega_p));
}

inline cplx susceptibility_slope(const SusceptibilityModel& m, double omega_p) noexcept {
  return sign_of(m.polarity) * (m.first.slope(omega_p) + m.second_sign() * m.second.slope(omega_p));
}

// ln|S21| + i phi for a given susceptibility; phi is the analytic phase, not
// reduced modulo 2 pi.
inline cplx ln_transmission(double omega_p, cplx chi, const BaselineParams& b) noexcept {
  const double k = omega_p * b.l_eff / BaselineParams::c;
  const cplx i(0.0, 1.0);
  return i * k * (1.0 + 0.5 * chi) - b.alpha0 + i * b.phi0;
}

inline cplx eval_ln_s21(const SusceptibilityModel& m, double omega_p) noexcept {
  return ln_transmission(omega_p, eval_susceptibility(m, omega_p), m.baseline);
}

// d phi / d omega_p of the model phase, in seconds.
inline double phase_slope(const SusceptibilityModel& m, double omega_p) noexcept {
  const double l_over_c = m.baseline.l_eff / BaselineParams::c;
  const cplx chi = eval_susceptibility(m, omega_p);
  const cplx dchi = susceptibility_slope(m, omega_p);
  return l_over_c * (1.0 + 0.5 * chi.real()) + 0.5 * omega_p * l_over_c * dchi.real();
}

}  // namespace eitlab

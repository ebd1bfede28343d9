#pragma once

// Nested polariton level structure of a coherently driven two-level system
// dispersively coupled to one cavity mode. Everything is in angular units
// (rad/s); energies live in the frame rotating at the drive frequency, which
// acts on the qubit excitation only, so differences between the zero- and
// one-photon blocks are lab-frame probe frequencies.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/units.hpp"

namespace eitlab {

struct DeviceParams {
  double omega_q = 0.0;  // bare qubit frequency; the n = 0 transition sits at omega_q - chi
  double omega_r = 0.0;
  double chi = 0.0;
  double gamma_q = 0.0;
  double gamma_c = 0.0;
  double line_length_l = 0.0;  // meters
  // Characterization only; no equation consumes these.
  double coupling_g = 0.0;
  double anharmonicity_alpha = 0.0;

  // Builds the device from the measured n = 0 qubit line (omega_q - chi).
  static DeviceParams from_n0_transition(double n0_transition, double omega_r, double chi,
                                         double gamma_q, double gamma_c, double line_length_l) {
    return DeviceParams{n0_transition + chi, omega_r, chi, gamma_q, gamma_c, line_length_l};
  }

  double n0_transition() const noexcept { return omega_q - chi; }
  double n1_transition() const noexcept { return omega_q - 3.0 * chi; }

  void validate() const {
    if (!(omega_q > 0.0) || !(omega_r > 0.0) || !(chi > 0.0))
      throw InvalidArgument("device: omega_q, omega_r and chi must be positive");
    if (!(gamma_q >= 0.0)) throw InvalidArgument("device: gamma_q must be non-negative");
    if (!(gamma_c > 0.0)) throw InvalidArgument("device: gamma_c must be positive");
    if (!(line_length_l > 0.0)) throw InvalidArgument("device: line_length_l must be positive");
    if (!(chi < 0.1 * std::abs(omega_r - omega_q)))
      throw InvalidArgument("device: not dispersive (chi must be < 0.1 |omega_r - omega_q|)");
  }
};

struct PolaritonDrive {
  double omega_d = 0.0;
  double rabi = 0.0;  // Omega_d

  void validate() const {
    if (!(rabi >= 0.0)) throw InvalidArgument("drive: Rabi strength must be non-negative");
  }
};

struct MixingAngles {
  double theta0 = 0.0;  // [0, pi)
  double theta1 = 0.0;
  double delta0 = 0.0;  // (omega_q - chi) - omega_d
  double delta1 = 0.0;  // omega_d - (omega_q - 3 chi)
  bool degenerate = false;  // some block has zero detuning and zero drive
};

namespace detail {

// Two-argument arctangent folded onto [0, pi). Both arguments zero -> 0.
inline double half_open_angle(double rabi, double delta) noexcept {
  if (rabi == 0.0 && delta == 0.0) return 0.0;
  double a = std::atan2(rabi, delta);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

}  // namespace detail

inline MixingAngles mixing_angles(const DeviceParams& device, const PolaritonDrive& drive) {
  MixingAngles m;
  m.delta0 = device.n0_transition() - drive.omega_d;
  m.delta1 = drive.omega_d - device.n1_transition();
  m.theta0 = detail::half_open_angle(drive.rabi, m.delta0);
  m.theta1 = detail::half_open_angle(drive.rabi, m.delta1);
  m.degenerate = drive.rabi == 0.0 && (m.delta0 == 0.0 || m.delta1 == 0.0);
  return m;
}

inline bool in_nesting_regime(const DeviceParams& device, double omega_d) noexcept {
  return device.n1_transition() < omega_d && omega_d < device.n0_transition();
}

inline bool eit_condition(double control_rabi, const DeviceParams& device) noexcept {
  return control_rabi < device.gamma_c;
}

// Real 2-vector over {|g,n>, |e,n>}.
struct StateAmplitudes {
  double g = 0.0;
  double e = 0.0;
};

// Symmetric 2x2 block [[diag_g, coupling], [coupling, diag_e]].
struct Block2 {
  double diag_g = 0.0;
  double diag_e = 0.0;
  double coupling = 0.0;
};

struct BlockEigen {
  double lower = 0.0;
  double upper = 0.0;
  StateAmplitudes lower_state;
  StateAmplitudes upper_state;
};

// Closed-form eigen-decomposition. Phase: g component real and non-negative;
// if it vanishes, the e component is made non-negative.
inline BlockEigen diagonalize(const Block2& b) noexcept {
  const double mean = 0.5 * (b.diag_g + b.diag_e);
  const double half_gap = 0.5 * (b.diag_e - b.diag_g);
  const double radius = std::hypot(half_gap, b.coupling);
  BlockEigen out;
  out.lower = mean - radius;
  out.upper = mean + radius;

  auto fix_phase = [](StateAmplitudes v) {
    const double sign = (v.g > 0.0 || (v.g == 0.0 && v.e >= 0.0)) ? 1.0 : -1.0;
    return StateAmplitudes{sign * v.g, sign * v.e};
  };

  if (radius == 0.0) {
    out.lower_state = {1.0, 0.0};
    out.upper_state = {0.0, 1.0};
    return out;
  }
  // Angle convention: the lower eigenvector is (cos(phi/2), -sin(phi/2)) with
  // tan(phi) = coupling / half_gap, computed without cancellation.
  const double phi = std::atan2(b.coupling, half_gap);
  const double c = std::cos(0.5 * phi);
  const double s = std::sin(0.5 * phi);
  out.lower_state = fix_phase({c, -s});
  out.upper_state = fix_phase({s, c});
  return out;
}

struct DecayRates {
  double gamma_31 = 0.0;
  double gamma_32 = 0.0;
  double gamma_21 = 0.0;
};

struct ProbeTransitions {
  double omega_13 = 0.0;
  double omega_23 = 0.0;
  double omega_14 = 0.0;
  double omega_24 = 0.0;
};

struct PolaritonSystem {
  MixingAngles angles;
  std::array<double, 4> energies{};  // E1..E4, rotating frame
  std::array<StateAmplitudes, 4> amplitudes{};  // 1,2 over {g0,e0}; 3,4 over {g1,e1}
  DecayRates decay_rates;
  ProbeTransitions transitions;
  bool nesting = false;
};

// Zero-photon block over {|g,0>, |e,0>}: |e,0> sits delta0 above |g,0>.
inline Block2 zero_photon_block(const MixingAngles& m, double rabi) noexcept {
  return Block2{0.0, m.delta0, 0.5 * rabi};
}

// One-photon block over {|g,1>, |e,1>}: |g,1> sits delta1 above |e,1>, which
// is pinned at omega_r.
inline Block2 one_photon_block(const DeviceParams& device, const MixingAngles& m,
                               double rabi) noexcept {
  return Block2{device.omega_r + m.delta1, device.omega_r, 0.5 * rabi};
}

inline DecayRates decay_rates(const DeviceParams& device, const MixingAngles& m) noexcept {
  const double half_sum = 0.5 * (m.theta0 + m.theta1);
  const double s = std::sin(half_sum);
  const double c = std::cos(half_sum);
  const double c0 = std::cos(0.5 * m.theta0);
  DecayRates r;
  r.gamma_31 = device.gamma_c * s * s;
  r.gamma_32 = device.gamma_c * c * c;
  r.gamma_21 = device.gamma_q * c0 * c0 * c0 * c0;
  return r;
}

inline PolaritonSystem build_polaritons(const DeviceParams& device, const PolaritonDrive& drive) {
  device.validate();
  drive.validate();
  PolaritonSystem sys;
  sys.angles = mixing_angles(device, drive);
  sys.nesting = in_nesting_regime(device, drive.omega_d);

  const BlockEigen zero = diagonalize(zero_photon_block(sys.angles, drive.rabi));
  const BlockEigen one = diagonalize(one_photon_block(device, sys.angles, drive.rabi));
  sys.energies = {zero.lower, zero.upper, one.lower, one.upper};
  sys.amplitudes = {zero.lower_state, zero.upper_state, one.lower_state, one.upper_state};
  sys.decay_rates = decay_rates(device, sys.angles);

  const auto& e = sys.energies;
  sys.transitions.omega_13 = e[2] - e[0];
  sys.transitions.omega_23 = e[2] - e[1];
  sys.transitions.omega_14 = e[3] - e[0];
  sys.transitions.omega_24 = e[3] - e[1];
  return sys;
}

struct TransitionRow {
  double rabi = 0.0;
  ProbeTransitions transitions;
  bool nesting = false;
};

// Transition frequencies across a grid of drive strengths at fixed omega_d.
inline std::vector<TransitionRow> transition_curves(const DeviceParams& device, double omega_d,
                                                    std::span<const double> rabi_grid) {
  if (rabi_grid.empty()) throw InvalidArgument("transition_curves: empty drive-strength grid");
  std::vector<TransitionRow> rows;
  rows.reserve(rabi_grid.size());
  for (double rabi : rabi_grid) {
    if (!(rabi >= 0.0)) throw InvalidArgument("transition_curves: negative drive strength");
    const auto sys = build_polaritons(device, PolaritonDrive{omega_d, rabi});
    rows.push_back({rabi, sys.transitions, sys.nesting});
  }
  return rows;
}

}  // namespace eitlab

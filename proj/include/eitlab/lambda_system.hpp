#pragma once

// Driven three-level Lambda system {|1>, |2>, |3>}: a probe couples 1-3, a
// control couples 2-3, and |3> decays into both ground legs while |2> relaxes
// into |1>. The Hamiltonian is written in the frame co-rotating with both
// drives under the rotating-wave approximation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/parallel.hpp"
#include "eitlab/polariton.hpp"
#include "eitlab/spectrum.hpp"
#include "eitlab/susceptibility.hpp"

namespace eitlab {

using Matrix3c = Eigen::Matrix3cd;
using Matrix9c = Eigen::Matrix<std::complex<double>, 9, 9>;
using Vector9c = Eigen::Matrix<std::complex<double>, 9, 1>;

struct LambdaConfig {
  double omega_13 = 0.0;
  double omega_23 = 0.0;
  double gamma_31 = 0.0;
  double gamma_32 = 0.0;
  double gamma_21 = 0.0;
  // Pure dephasing: coherences touching level k decay at gamma_phi_k.
  double gamma_phi2 = 0.0;
  double gamma_phi3 = 0.0;
  double probe_rabi = 0.0;  // Omega_p
  double omega_p = 0.0;
  double control_rabi = 0.0;  // Omega_c
  double omega_c = 0.0;

  double probe_detuning() const noexcept { return omega_p - omega_13; }
  double control_detuning() const noexcept { return omega_c - omega_23; }

  void validate() const {
    if (!(gamma_31 >= 0.0) || !(gamma_32 >= 0.0) || !(gamma_21 >= 0.0) || !(gamma_phi2 >= 0.0) ||
        !(gamma_phi3 >= 0.0))
      throw InvalidArgument("lambda config: rates must be non-negative");
    if (!(probe_rabi >= 0.0) || !(control_rabi >= 0.0))
      throw InvalidArgument("lambda config: Rabi strengths must be non-negative");
    if (!(omega_13 > omega_23))
      throw InvalidArgument("lambda config: omega_13 must exceed omega_23");
  }

  bool any_decay() const noexcept {
    return gamma_31 > 0.0 || gamma_32 > 0.0 || gamma_21 > 0.0;
  }
};

// Lambda problem on the polariton levels, with both drives resonant.
inline LambdaConfig lambda_from_polaritons(const PolaritonSystem& sys, double probe_rabi,
                                           double control_rabi) {
  LambdaConfig cfg;
  cfg.omega_13 = sys.transitions.omega_13;
  cfg.omega_23 = sys.transitions.omega_23;
  cfg.gamma_31 = sys.decay_rates.gamma_31;
  cfg.gamma_32 = sys.decay_rates.gamma_32;
  cfg.gamma_21 = sys.decay_rates.gamma_21;
  cfg.probe_rabi = probe_rabi;
  cfg.omega_p = cfg.omega_13;
  cfg.control_rabi = control_rabi;
  cfg.omega_c = cfg.omega_23;
  return cfg;
}

inline Matrix3c build_hamiltonian(const LambdaConfig& cfg) {
  const double dp = cfg.probe_detuning();
  const double dc = cfg.control_detuning();
  Matrix3c h = Matrix3c::Zero();
  h(1, 1) = -(dp - dc);
  h(2, 2) = -dp;
  h(2, 0) = h(0, 2) = 0.5 * cfg.probe_rabi;
  h(2, 1) = h(1, 2) = 0.5 * cfg.control_rabi;
  return h;
}

namespace detail {

// vec(A X B) = (B^T kron A) vec(X) for column-stacked vec.
inline Matrix9c kron3(const Matrix3c& a, const Matrix3c& b) {
  Matrix9c out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

inline Matrix3c ket_bra(int i, int j) {
  Matrix3c m = Matrix3c::Zero();
  m(i, j) = 1.0;
  return m;
}

inline Matrix9c dissipator(const Matrix3c& c) {
  const Matrix3c id = Matrix3c::Identity();
  const Matrix3c cdc = c.adjoint() * c;
  return kron3(c.conjugate(), c) - 0.5 * kron3(id, cdc) - 0.5 * kron3(cdc.transpose(), id);
}

}  // namespace detail

inline std::vector<Matrix3c> collapse_operators(const LambdaConfig& cfg) {
  using detail::ket_bra;
  std::vector<Matrix3c> ops;
  auto add = [&](double rate, const Matrix3c& op) {
    if (rate > 0.0) ops.push_back(std::sqrt(rate) * op);
  };
  add(cfg.gamma_31, ket_bra(0, 2));
  add(cfg.gamma_32, ket_bra(1, 2));
  add(cfg.gamma_21, ket_bra(0, 1));
  // D[sqrt(2 g) |k><k|] damps every coherence rho_jk (j != k) at rate g.
  add(2.0 * cfg.gamma_phi2, ket_bra(1, 1));
  add(2.0 * cfg.gamma_phi3, ket_bra(2, 2));
  return ops;
}

// Superoperator acting on the column-stacked density matrix.
inline Matrix9c build_liouvillian(const LambdaConfig& cfg) {
  const Matrix3c h = build_hamiltonian(cfg);
  const Matrix3c id = Matrix3c::Identity();
  const std::complex<double> i(0.0, 1.0);
  Matrix9c l = -i * (detail::kron3(id, h) - detail::kron3(h.transpose(), id));
  for (const auto& c : collapse_operators(cfg)) l += detail::dissipator(c);
  return l;
}

inline Vector9c vec(const Matrix3c& rho) {
  Vector9c v;
  for (int col = 0; col < 3; ++col)
    for (int row = 0; row < 3; ++row) v(3 * col + row) = rho(row, col);
  return v;
}

inline Matrix3c unvec(const Vector9c& v) {
  Matrix3c m;
  for (int col = 0; col < 3; ++col)
    for (int row = 0; row < 3; ++row) m(row, col) = v(3 * col + row);
  return m;
}

struct DensityTolerances {
  double hermitian = 1e-10;
  double trace = 1e-10;
  double positivity = 1e-9;
};

class DensityMatrix3 {
 public:
  DensityMatrix3() : rho_(Matrix3c::Zero()) { rho_(0, 0) = 1.0; }
  explicit DensityMatrix3(const Matrix3c& rho) : rho_(rho) {}

  const Matrix3c& matrix() const noexcept { return rho_; }
  std::complex<double> operator()(int i, int j) const { return rho_(i, j); }

  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
  double trace_error() const { return std::abs(rho_.trace() - 1.0); }
  double min_eigenvalue() const {
    const Matrix3c herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  bool is_physical(const DensityTolerances& tol = {}) const {
    return hermiticity_error() <= tol.hermitian && trace_error() <= tol.trace &&
           min_eigenvalue() >= -tol.positivity;
  }

  // <psi| rho |psi>, real part.
  double expectation(const Eigen::Vector3cd& psi) const {
    return (psi.adjoint() * rho_ * psi)(0, 0).real();
  }

 private:
  Matrix3c rho_;
};

struct SteadyStateOptions {
  DensityTolerances tolerances;
  double residual_tolerance = 1e-10;  // relative to the Frobenius norm of L
  double rank_tolerance = 1e-13;      // on the reciprocal condition number
};

// Solves L vec(rho) = 0 with the rho_11 equation replaced by tr(rho) = 1.
inline DensityMatrix3 steady_state(const LambdaConfig& cfg, const SteadyStateOptions& opt = {}) {
  cfg.validate();
  if (!cfg.any_decay())
    throw SingularSystem("steady_state: no decay channel, steady state not unique", INFINITY);

  const Matrix9c l = build_liouvillian(cfg);
  // The trace row is scaled to the rate scale of L so it does not dominate
  // (or vanish in) the conditioning of the constrained system.
  const double row_scale = std::max(l.norm() / 3.0, 1.0);
  Matrix9c a = l;
  a.row(0).setZero();
  for (int k = 0; k < 3; ++k) a(0, 4 * k) = row_scale;
  Vector9c rhs = Vector9c::Zero();
  rhs(0) = row_scale;

  Eigen::JacobiSVD<Matrix9c> svd(a);
  const auto& sv = svd.singularValues();
  const double rcond = sv(8) / sv(0);
  if (!(rcond > opt.rank_tolerance)) {
    std::ostringstream msg;
    msg << "steady_state: trace-constrained Liouvillian is rank deficient (condition estimate "
        << 1.0 / rcond << ")";
    throw SingularSystem(msg.str(), 1.0 / rcond);
  }

  const Vector9c x = a.fullPivLu().solve(rhs);
  const double residual = (l * x).norm();
  if (residual > opt.residual_tolerance * l.norm()) {
    std::ostringstream msg;
    msg << "steady_state: residual " << residual << " exceeds tolerance";
    throw SingularSystem(msg.str(), 1.0 / rcond);
  }

  DensityMatrix3 rho(unvec(x));
  if (rho.min_eigenvalue() < -opt.tolerances.positivity) {
    std::ostringstream msg;
    msg << "steady_state: negative eigenvalue " << rho.min_eigenvalue();
    throw NonPhysical(msg.str());
  }
  return rho;
}

// Susceptibility scale and line baseline used to turn a coherence into S21:
// chi_s = scale * rho_13 / Omega_p, followed by the ln S21 mapping.
struct TransmissionMapping {
  double scale = 1.0;  // rad/s; a negative value flips the line into a transmission peak
  BaselineParams baseline;
};

inline std::complex<double> susceptibility_from_coherence(std::complex<double> rho_31,
                                                          double probe_rabi, double scale) {
  return scale * std::conj(rho_31) / probe_rabi;
}

inline ComplexSpectrum probe_sweep(const LambdaConfig& tmpl, std::span<const double> omega_p_grid,
                                   const TransmissionMapping& mapping,
                                   const SteadyStateOptions& opt = {}) {
  if (!(tmpl.probe_rabi > 0.0)) throw InvalidArgument("probe_sweep: probe Rabi must be positive");
  for (std::size_t i = 1; i < omega_p_grid.size(); ++i)
    if (!(omega_p_grid[i] > omega_p_grid[i - 1]))
      throw InvalidArgument("probe_sweep: grid not strictly increasing");

  auto points = parallel_map(omega_p_grid.size(), [&](std::size_t i) {
    LambdaConfig cfg = tmpl;
    cfg.omega_p = omega_p_grid[i];
    SpectrumPoint pt;
    pt.omega_p = cfg.omega_p;
    try {
      pt.rho_31 = steady_state(cfg, opt)(2, 0);
    } catch (const SingularSystem& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << e.what() << " [omega_p = " << cfg.omega_p << " rad/s]";
      throw SingularSystem(msg.str(), e.condition_estimate());
    } catch (const NonPhysical& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << e.what() << " [omega_p = " << cfg.omega_p << " rad/s]";
      throw NonPhysical(msg.str());
    }
    const auto chi = susceptibility_from_coherence(pt.rho_31, cfg.probe_rabi, mapping.scale);
    const auto ln_s = ln_transmission(pt.omega_p, chi, mapping.baseline);
    pt.s21 = std::exp(ln_s);
    pt.phase = ln_s.imag();
    return pt;
  });
  return ComplexSpectrum(std::move(points));
}

// Dark-state mixing angle atan(Omega_p / Omega_c), pi/2 when Omega_c = 0.
inline double dark_state_angle(double probe_rabi, double control_rabi) {
  if (probe_rabi == 0.0 && control_rabi == 0.0)
    throw DegenerateAngle("dark state undefined when both drive strengths vanish");
  return std::atan2(probe_rabi, control_rabi);
}

inline double dark_state_fidelity(const DensityMatrix3& rho, double probe_rabi,
                                  double control_rabi) {
  const double theta = dark_state_angle(probe_rabi, control_rabi);
  Eigen::Vector3cd dark(std::cos(theta), -std::sin(theta), 0.0);
  const double overlap = rho.expectation(dark);
  return std::sqrt(std::clamp(overlap, 0.0, 1.0));
}

// Same quantity written out in matrix elements. The trailing population
// term is rho_11 + rho_22 = 1 - rho_33.
inline double dark_state_fidelity_expanded(const DensityMatrix3& rho, double probe_rabi,
                                           double control_rabi) {
  const double theta = dark_state_angle(probe_rabi, control_rabi);
  const double r11 = rho(0, 0).real();
  const double r22 = rho(1, 1).real();
  const double r33 = rho(2, 2).real();
  const double coh = (rho(1, 0) + rho(0, 1)).real();
  const double v =
      0.5 * (std::cos(2 * theta) * (r11 - r22) - std::sin(2 * theta) * coh + (1.0 - r33));
  return std::sqrt(std::clamp(v, 0.0, 1.0));
}

struct FidelityRow {
  double probe_rabi = 0.0;
  double control_rabi = 0.0;
  double fidelity = 0.0;
};

// Steady-state dark-state fidelity over (Omega_p, Omega_c) pairs. Swapping
// the roles of the two fields is just a matter of which strength goes first.
inline std::vector<FidelityRow> fidelity_scan(const LambdaConfig& tmpl,
                                              std::span<const std::pair<double, double>> strengths,
                                              const SteadyStateOptions& opt = {}) {
  return parallel_map(strengths.size(), [&](std::size_t i) {
    LambdaConfig cfg = tmpl;
    cfg.probe_rabi = strengths[i].first;
    cfg.control_rabi = strengths[i].second;
    const auto rho = steady_state(cfg, opt);
    return FidelityRow{cfg.probe_rabi, cfg.control_rabi,
                       dark_state_fidelity(rho, cfg.probe_rabi, cfg.control_rabi)};
  });
}

}  // namespace eitlab

#pragma once

// Reference computations that share no code with the library: closed-form
// steady states, brute-force eigensolvers and finite differences.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using cplx = std::complex<double>;

// Probe on 1-3 only, level 2 a shelf fed by 3 -> 2 and drained by 2 -> 1.
// Optional pure dephasing of level 3 at rate gphi3 (coherence decay).
struct ShelvedTwoLevel {
  double rho11, rho22, rho33;
  cplx rho31;
};

inline ShelvedTwoLevel shelved_two_level(double detuning, double rabi, double g31, double g32, double g21,
                                         double gphi3 = 0.0) {
  const double gamma3 = g31 + g32;
  const double coh = 0.5 * gamma3 + gphi3;  // decay rate of rho31
  // Steady population transfer: Gamma3 rho33 = Omega^2 coh / (2 (D^2 + coh^2)) (rho11 - rho33)
  const double pump = 0.5 * rabi * rabi * coh / (detuning * detuning + coh * coh) / gamma3;
  const double shelf = g21 > 0.0 ? g32 / g21 : 0.0;
  const double rho33 = pump / (1.0 + pump * (2.0 + shelf));
  const double rho22 = shelf * rho33;
  const double rho11 = 1.0 - rho22 - rho33;
  const cplx rho31 = 0.5 * rabi * (rho11 - rho33) / cplx(detuning, coh);
  return {rho11, rho22, rho33, rho31};
}

// First-order probe coherence of a Lambda system with both upper-level
// couplings, for a probe weak enough that rho11 ~ 1.
inline cplx linear_response_rho31(double dp, double dc, double probe, double control, double g31, double g32,
                                  double g21) {
  const cplx d3(dp, 0.5 * (g31 + g32));
  const cplx d2(dp - dc, 0.5 * g21);
  return 0.5 * probe / (d3 - 0.25 * control * control / d2);
}

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  Eigen::VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

// Central difference with step h.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle

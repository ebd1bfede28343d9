#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "eitlab/errors.hpp"

namespace eitlab {

struct SpectrumPoint {
  double omega_p = 0.0;                  // rad/s
  std::complex<double> rho_31{0.0, 0.0};  // zero for measured data
  std::complex<double> s21{1.0, 0.0};
  double phase = 0.0;  // unwrapped phase of s21, radians

  double ln_magnitude() const { return std::log(std::abs(s21)); }
};

// Ordered probe sweep. Frequencies strictly increase; S21 is finite and
// nonzero everywhere.
class ComplexSpectrum {
 public:
  ComplexSpectrum() = default;
  explicit ComplexSpectrum(std::vector<SpectrumPoint> points) : points_(std::move(points)) {
    validate();
  }

  std::span<const SpectrumPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const SpectrumPoint& operator[](std::size_t i) const { return points_[i]; }

  std::vector<double> frequencies() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.omega_p);
    return out;
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (!std::isfinite(p.omega_p) || !std::isfinite(p.s21.real()) ||
          !std::isfinite(p.s21.imag()) || !std::isfinite(p.phase))
        throw InvalidArgument("spectrum: non-finite value at point " + std::to_string(i));
      if (std::abs(p.s21) == 0.0)
        throw InvalidArgument("spectrum: zero transmission at point " + std::to_string(i));
      if (i > 0 && !(p.omega_p > points_[i - 1].omega_p))
        throw InvalidArgument("spectrum: frequencies not strictly increasing at point " +
                              std::to_string(i));
    }
  }

  std::vector<SpectrumPoint> points_;
};

// Removes 2 pi jumps between consecutive samples. Idempotent on a trace whose
// consecutive differences are already below pi in magnitude.
inline std::vector<double> unwrap_phase(std::span<const double> wrapped) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(wrapped.begin(), wrapped.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double d = wrapped[i] - wrapped[i - 1];
    if (d > std::numbers::pi)
      offset -= two_pi * std::ceil((d - std::numbers::pi) / two_pi);
    else if (d < -std::numbers::pi)
      offset += two_pi * std::ceil((-d - std::numbers::pi) / two_pi);
    out[i] = wrapped[i] + offset;
  }
  return out;
}

// Rebuilds the phase column of a spectrum from arg(S21), unwrapped.
inline ComplexSpectrum with_unwrapped_phase(const ComplexSpectrum& in) {
  std::vector<double> wrapped;
  wrapped.reserve(in.size());
  for (const auto& p : in.points()) wrapped.push_back(std::arg(p.s21));
  const auto phase = unwrap_phase(wrapped);
  std::vector<SpectrumPoint> pts(in.points().begin(), in.points().end());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].phase = phase[i];
  return ComplexSpectrum(std::move(pts));
}

// Subtracts the least-squares line through the phase (electric delay).
inline ComplexSpectrum remove_linear_phase(const ComplexSpectrum& in) {
  const std::size_t n = in.size();
  if (n < 2) return in;
  double mx = 0.0, my = 0.0;
  for (const auto& p : in.points()) {
    mx += p.omega_p;
    my += p.phase;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : in.points()) {
    sxx += (p.omega_p - mx) * (p.omega_p - mx);
    sxy += (p.omega_p - mx) * (p.phase - my);
  }
  const double slope = sxy / sxx;
  std::vector<SpectrumPoint> pts(in.points().begin(), in.points().end());
  for (auto& p : pts) {
    const double trend = slope * (p.omega_p - mx);
    p.phase -= trend;
    p.s21 *= std::polar(1.0, -trend);
  }
  return ComplexSpectrum(std::move(pts));
}

// Adds circular complex Gaussian noise to S21 with total variance
// mean(|S21|^2) * 10^(-snr_db / 10). The phase column is re-derived so it
// stays continuous with the noiseless phase.
inline ComplexSpectrum add_noise(const ComplexSpectrum& in, double snr_db, std::uint64_t seed) {
  double power = 0.0;
  for (const auto& p : in.points()) power += std::norm(p.s21);
  power /= static_cast<double>(in.size());
  const double sigma = std::sqrt(0.5 * power * std::pow(10.0, -snr_db / 10.0));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<SpectrumPoint> pts(in.points().begin(), in.points().end());
  for (auto& p : pts) {
    const std::complex<double> clean = p.s21;
    const double re = gauss(rng);
    const double im = gauss(rng);
    p.s21 = clean + std::complex<double>(re, im);
    p.phase += std::arg(p.s21 / clean);
  }
  return ComplexSpectrum(std::move(pts));
}

}  // namespace eitlab

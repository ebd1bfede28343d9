#pragma once

// Simultaneous fit of ln|S21| and the unwrapped phase to the EIT or ATS
// susceptibility model. Both halves of the residual come from one complex
// model, so magnitude and phase stay Kramers-Kronig consistent.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/levenberg_marquardt.hpp"
#include "eitlab/spectrum.hpp"
#include "eitlab/susceptibility.hpp"

namespace eitlab {

inline constexpr int kModelParameters = 9;

// Physical parameter order used for covariances and standard errors.
inline constexpr std::array<const char*, kModelParameters> kParameterNames = {
    "amplitude_1", "amplitude_2", "center_1", "center_2", "width_1",
    "width_2",     "l_eff",       "alpha0",   "phi0"};

inline std::array<double, kModelParameters> parameter_vector(const SusceptibilityModel& m) {
  return {m.first.amplitude, m.second.amplitude, m.first.center,    m.second.center,
          m.first.width,     m.second.width,     m.baseline.l_eff, m.baseline.alpha0,
          m.baseline.phi0};
}

struct ResidualWeights {
  double magnitude = 1.0;
  double phase = 1.0;
  // Additionally weight each point by |S21| / rms|S21|. Complex noise of fixed
  // variance on S21 has standard deviation proportional to 1/|S21| in both
  // ln|S21| and phase, so this makes the residuals homoscedastic.
  bool by_magnitude = true;

  friend bool operator==(const ResidualWeights&, const ResidualWeights&) = default;
};

struct FitOptions {
  ResidualWeights weights;
  lm::Options lm;
  int perturbed_starts = 4;
  bool standard_starts = true;  // detected, two-stage and jittered seeds
  std::vector<SusceptibilityModel> extra_starts;  // kind is overridden by the fitted model
  std::uint64_t start_seed = 0x5eedf17ULL;
  double l_eff_guess = 0.01;  // meters, starting value for L_eff
  // Lower bound on fitted widths in mean sample spacings. Narrower lines can
  // only fit single noise points.
  double min_width_steps = 2.0;
};

struct FitResult {
  ModelKind kind = ModelKind::eit;
  SusceptibilityModel model;
  double rss = 0.0;
  int n = 0;  // scalar residuals
  int k = kModelParameters;
  ResidualWeights weights;
  Eigen::MatrixXd covariance;  // physical parameter order, see kParameterNames
  std::array<double, kModelParameters> standard_errors{};
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::string stop_reason;
  int starts = 0;
};

namespace detail {

// Internal coordinates: log magnitudes, normalized centers, log excess widths
// over width_floor, log
// L_eff, alpha0, and the total phase at the reference frequency
// (phi0 + w_ref L / c). Positivity is built in, and the weakly determined
// L_eff direction (magnitudes scale as 1/L_eff at fixed reference phase) is a
// straight line in these coordinates.
struct Coordinates {
  double center_ref = 0.0;
  double center_scale = 1.0;
  double width_floor = 0.0;  // narrowest line the sampling resolves

  double excess(double width) const {
    return std::log(std::max(width - width_floor, 1e-3 * std::max(width_floor, width)));
  }

  Eigen::VectorXd to_internal(const SusceptibilityModel& m) const {
    Eigen::VectorXd x(kModelParameters);
    const double tiny = std::numeric_limits<double>::min();
    x << std::log(std::max(m.first.amplitude, tiny)), std::log(std::max(m.second.amplitude, tiny)),
        (m.first.center - center_ref) / center_scale, (m.second.center - center_ref) / center_scale,
        excess(m.first.width), excess(m.second.width), std::log(m.baseline.l_eff),
        m.baseline.alpha0, m.baseline.phi0 + center_ref * m.baseline.l_eff / BaselineParams::c;
    return x;
  }

  SusceptibilityModel to_model(const Eigen::VectorXd& x, ModelKind kind, Polarity pol) const {
    SusceptibilityModel m;
    m.kind = kind;
    m.polarity = pol;
    m.first = {std::exp(x(0)), center_ref + center_scale * x(2), width_floor + std::exp(x(4))};
    m.second = {std::exp(x(1)), center_ref + center_scale * x(3), width_floor + std::exp(x(5))};
    const double l_eff = std::exp(x(6));
    m.baseline = {l_eff, x(7), x(8) - center_ref * l_eff / BaselineParams::c};
    return m;
  }

  // d(physical)/d(internal). Diagonal except phi0, which also moves with L_eff.
  Eigen::MatrixXd jacobian(const SusceptibilityModel& m) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(kModelParameters, kModelParameters);
    g(0, 0) = m.first.amplitude;
    g(1, 1) = m.second.amplitude;
    g(2, 2) = center_scale;
    g(3, 3) = center_scale;
    g(4, 4) = m.first.width - width_floor;
    g(5, 5) = m.second.width - width_floor;
    g(6, 6) = m.baseline.l_eff;
    g(7, 7) = 1.0;
    g(8, 8) = 1.0;
    g(8, 6) = -center_ref * m.baseline.l_eff / BaselineParams::c;
    return g;
  }
};

class SpectrumProblem {
 public:
  SpectrumProblem(const ComplexSpectrum& data, ModelKind kind, Polarity pol, Coordinates coords,
                  ResidualWeights w, std::array<bool, kModelParameters> frozen = {})
      : kind_(kind), pol_(pol), coords_(coords), w_(w), frozen_(frozen) {
    const auto n = static_cast<Eigen::Index>(data.size());
    omega_.resize(n);
    ln_mag_.resize(n);
    phase_.resize(n);
    point_w_ = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = data[static_cast<std::size_t>(i)];
      omega_(i) = p.omega_p;
      ln_mag_(i) = p.ln_magnitude();
      phase_(i) = p.phase;
      if (w.by_magnitude) point_w_(i) = std::abs(p.s21);
    }
    if (w.by_magnitude) point_w_ /= std::sqrt(point_w_.squaredNorm() / static_cast<double>(n));
  }

  Eigen::Index residual_count() const { return 2 * omega_.size(); }

  double residual_norm2(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r;
    evaluate(x, r, nullptr);
    const double v = r.squaredNorm();
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const auto model = coords_.to_model(x, kind_, pol_);
    const Eigen::Index n = omega_.size();
    const double pol = sign_of(pol_);
    const double s2 = model.second_sign();
    const double l_over_c = model.baseline.l_eff / BaselineParams::c;
    const cplx i(0.0, 1.0);
    r.resize(2 * n);
    if (jac) jac->resize(2 * n, kModelParameters);

    for (Eigen::Index p = 0; p < n; ++p) {
      const double w = omega_(p);
      const cplx d1(w - model.first.center, -0.5 * model.first.width);
      const cplx d2(w - model.second.center, -0.5 * model.second.width);
      const cplx l1 = model.first.amplitude / d1;
      const cplx l2 = model.second.amplitude / d2;
      const cplx chi = pol * (l1 + s2 * l2);
      const double kappa = w * l_over_c;
      const cplx m = i * kappa * (1.0 + 0.5 * chi) - model.baseline.alpha0 + i * model.baseline.phi0;
      const double wm = w_.magnitude * point_w_(p), wp = w_.phase * point_w_(p);
      r(p) = wm * (ln_mag_(p) - m.real());
      r(n + p) = wp * (phase_(p) - m.imag());
      if (!jac) continue;

      const cplx dm_dchi = 0.5 * i * kappa;
      std::array<cplx, kModelParameters> dm{};
      dm[0] = dm_dchi * pol * l1;                // d/d log A1
      dm[1] = dm_dchi * pol * s2 * l2;           // d/d log A2
      dm[2] = dm_dchi * pol * (l1 / d1) * coords_.center_scale;
      dm[3] = dm_dchi * pol * s2 * (l2 / d2) * coords_.center_scale;
      dm[4] = dm_dchi * pol * (l1 / d1) * (0.5 * i) * (model.first.width - coords_.width_floor);
      dm[5] = dm_dchi * pol * s2 * (l2 / d2) * (0.5 * i) * (model.second.width - coords_.width_floor);
      // d/d log L at fixed reference phase
      dm[6] = i * l_over_c * ((w - coords_.center_ref) + 0.5 * w * chi);
      dm[7] = -1.0;
      dm[8] = i;
      for (int k = 0; k < kModelParameters; ++k) {
        const bool off = frozen_[static_cast<std::size_t>(k)];
        (*jac)(p, k) = off ? 0.0 : -wm * dm[k].real();
        (*jac)(n + p, k) = off ? 0.0 : -wp * dm[k].imag();
      }
    }
  }

 private:
  ModelKind kind_;
  Polarity pol_;
  Coordinates coords_;
  ResidualWeights w_;
  std::array<bool, kModelParameters> frozen_;
  Eigen::VectorXd omega_, ln_mag_, phase_, point_w_;
};

inline std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
  const std::size_t n = v.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += v[j];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// Baseline from the outer tenth of the trace on each side. L_eff is barely
// constrained by a narrow trace (line tails dominate the edge phase slope),
// so it starts from the supplied guess.
inline BaselineParams guess_baseline(const ComplexSpectrum& data, double l_eff_guess) {
  const std::size_t n = data.size();
  const std::size_t edge = std::max<std::size_t>(3, n / 10);
  double my = 0.0, mp = 0.0;
  std::size_t cnt = 0;
  auto take = [&](std::size_t i) {
    my += data[i].ln_magnitude();
    mp += data[i].phase - data[i].omega_p * l_eff_guess / BaselineParams::c;
    ++cnt;
  };
  for (std::size_t i = 0; i < edge; ++i) take(i);
  for (std::size_t i = n - edge; i < n; ++i) take(i);

  BaselineParams b;
  b.l_eff = l_eff_guess;
  b.alpha0 = -my / static_cast<double>(cnt);
  b.phi0 = mp / static_cast<double>(cnt);
  return b;
}

struct Peak {
  std::size_t index = 0;
  double height = 0.0;
};

// Seeds for both line shapes from the positive-going feature f (the imaginary
// part of the unsigned susceptibility implied by ln|S21|).
struct Seeds {
  SusceptibilityModel eit;
  SusceptibilityModel ats;
};

inline Seeds seed_models(const std::vector<double>& omega, const std::vector<double>& f,
                         const BaselineParams& baseline, Polarity pol) {
  const std::size_t n = omega.size();
  const double step = (omega.back() - omega.front()) / static_cast<double>(n - 1);
  const double min_width = 2.0 * step;
  const double max_width = 2.0 * (omega.back() - omega.front());

  const std::size_t ip = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  const double h = std::max(f[ip], 1e-12);

  std::size_t left = ip, right = ip;
  while (left > 0 && f[left - 1] >= 0.5 * h) --left;
  while (right + 1 < n && f[right + 1] >= 0.5 * h) ++right;
  // Extend across interior dips: outermost half-maximum crossings.
  for (std::size_t i = 0; i < n; ++i)
    if (f[i] >= 0.5 * h) {
      left = std::min(left, i);
      right = std::max(right, i);
    }
  const double broad_width = std::clamp(omega[right] - omega[left], min_width, max_width);

  // Local maxima above a quarter of the main peak.
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (f[i] >= f[i - 1] && f[i] > f[i + 1] && f[i] > 0.25 * h) peaks.push_back({i, f[i]});
  if (peaks.empty()) peaks.push_back({ip, h});
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });

  // Second peak: highest one separated from the main peak by a dip of at
  // least 10 % of its own height.
  std::optional<Peak> second;
  std::size_t window = ip;
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    const std::size_t a = std::min(ip, peaks[k].index), b = std::max(ip, peaks[k].index);
    std::size_t wmin = a;
    for (std::size_t i = a; i <= b; ++i)
      if (f[i] < f[wmin]) wmin = i;
    if (peaks[k].height - f[wmin] >= 0.1 * peaks[k].height) {
      second = peaks[k];
      window = wmin;
      break;
    }
  }

  Seeds s;
  const double amp = 0.5 * h * broad_width;
  if (second) {
    const double depth = std::max(std::min(h, second->height) - f[window], 1e-3 * h);
    std::size_t wl = window, wr = window;
    const double level = f[window] + 0.5 * depth;
    while (wl > 0 && f[wl] < level) --wl;
    while (wr + 1 < n && f[wr] < level) ++wr;
    const double narrow = std::clamp(omega[wr] - omega[wl], min_width, broad_width);
    s.eit = make_eit({amp, omega[window], broad_width}, {0.5 * depth * narrow, omega[window], narrow},
                     baseline, pol);

    const std::size_t p1 = std::min(ip, second->index), p2 = std::max(ip, second->index);
    const double sep = omega[p2] - omega[p1];
    auto outer_width = [&](std::size_t p, int dir) {
      std::size_t q = p;
      while (q > 0 && q + 1 < n && f[q] >= 0.5 * f[p]) q = dir < 0 ? q - 1 : q + 1;
      return std::clamp(2.0 * std::abs(omega[p] - omega[q]), min_width, 2.0 * sep);
    };
    const double w1 = outer_width(p1, -1), w2 = outer_width(p2, +1);
    s.ats = make_ats({0.5 * f[p1] * w1, omega[p1], w1}, {0.5 * f[p2] * w2, omega[p2], w2}, baseline,
                     pol);
  } else {
    const double c = omega[ip];
    s.eit = make_eit({amp, c, broad_width}, {0.05 * amp, c, std::max(0.2 * broad_width, min_width)},
                     baseline, pol);
    const double w = std::max(0.7 * broad_width, min_width);
    s.ats = make_ats({0.25 * h * w, c - 0.25 * broad_width, w}, {0.25 * h * w, c + 0.25 * broad_width, w},
                     baseline, pol);
  }
  return s;
}

// Imaginary part of the unsigned susceptibility implied by ln|S21| under a
// given baseline.
inline std::vector<double> feature_trace(const ComplexSpectrum& data, const BaselineParams& b) {
  std::vector<double> f(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double kappa = 0.5 * data[i].omega_p * b.l_eff / BaselineParams::c;
    f[i] = -(data[i].ln_magnitude() + b.alpha0) / kappa;
  }
  return f;
}

// Two-stage seed: fit the first line alone, then place the second line on the
// strongest residual feature of the sign the model allows.
template <class Solve>
SusceptibilityModel stagewise_seed(const ComplexSpectrum& data, const std::vector<double>& omega,
                                   const SusceptibilityModel& seed, const Coordinates& coords,
                                   const ResidualWeights& w, const Solve& solve) {
  const std::size_t n = omega.size();
  const double step = (omega.back() - omega.front()) / static_cast<double>(n - 1);
  const double min_width = 2.0 * step;

  SusceptibilityModel single = seed;
  single.second = {seed.first.amplitude * 1e-12, seed.first.center, seed.first.width};
  std::array<bool, kModelParameters> frozen{};
  frozen[1] = frozen[3] = frozen[5] = true;
  const SpectrumProblem problem(data, seed.kind, seed.polarity, coords, w, frozen);
  const auto stage = coords.to_model(solve(problem, coords.to_internal(single)), seed.kind,
                                     seed.polarity);

  const double pol = sign_of(seed.polarity);
  const double want = seed.second_sign();
  auto f = feature_trace(data, stage.baseline);
  for (std::size_t i = 0; i < n; ++i) f[i] = want * (pol * f[i] - stage.first.response(omega[i]).imag());
  f = moving_average(f, std::max<std::size_t>(1, n / 60) | 1);

  const std::size_t ip = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  const double h = std::max(f[ip], 1e-12);
  std::size_t left = ip, right = ip;
  while (left > 0 && f[left - 1] >= 0.5 * h) --left;
  while (right + 1 < n && f[right + 1] >= 0.5 * h) ++right;
  const double width = std::clamp(omega[right] - omega[left], min_width,
                                  2.0 * (omega.back() - omega.front()));

  SusceptibilityModel out = stage;
  out.second = {0.5 * h * width, omega[ip], width};
  return out;
}

inline SusceptibilityModel perturb(SusceptibilityModel m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double scale_width = std::min(m.first.width, m.second.width);
  auto jitter = [&](Lorentzian& l) {
    l.amplitude *= std::exp(0.4 * g(rng));
    l.width *= std::exp(0.4 * g(rng));
    l.center += 0.25 * scale_width * g(rng);
  };
  jitter(m.first);
  jitter(m.second);
  return m;
}

}  // namespace detail

// Levenberg-Marquardt fit with multi-start over both feature orientations;
// the lowest RSS wins.
inline FitResult fit_model(const ComplexSpectrum& data, ModelKind kind, const FitOptions& opt = {}) {
  const std::size_t n = data.size();
  if (n < 3 * static_cast<std::size_t>(kModelParameters))
    throw InvalidArgument("fit_model: need at least " + std::to_string(3 * kModelParameters) +
                          " points, got " + std::to_string(n));
  if (!(opt.min_width_steps >= 0.0) || !std::isfinite(opt.min_width_steps))
    throw InvalidArgument("fit_model: min_width_steps must be finite and non-negative");

  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& p : data.points()) {
    ymin = std::min(ymin, p.ln_magnitude());
    ymax = std::max(ymax, p.ln_magnitude());
  }
  if (!(ymax - ymin > 1e-12 * std::max(1.0, std::abs(ymax))))
    throw DegenerateData("fit_model: flat transmission magnitude, no feature to seed the fit");

  const auto omega = data.frequencies();
  detail::Coordinates coords;
  coords.center_ref = 0.5 * (omega.front() + omega.back());
  coords.center_scale = omega.back() - omega.front();
  coords.width_floor = opt.min_width_steps * coords.center_scale / static_cast<double>(n - 1);

  const BaselineParams baseline = detail::guess_baseline(data, opt.l_eff_guess);
  const auto smooth =
      detail::moving_average(detail::feature_trace(data, baseline), std::max<std::size_t>(1, n / 60) | 1);
  double fmax = -std::numeric_limits<double>::infinity(), fmin = -fmax;
  for (double v : smooth) {
    fmax = std::max(fmax, v);
    fmin = std::min(fmin, v);
  }
  const Polarity detected = (fmax >= -fmin) ? Polarity::absorption : Polarity::transmission;

  FitResult best;
  best.rss = std::numeric_limits<double>::infinity();
  lm::Result best_lm;
  SusceptibilityModel best_model;
  int runs = 0;
  auto run = [&](const SusceptibilityModel& start) {
    detail::SpectrumProblem problem(data, kind, start.polarity, coords, opt.weights);
    auto r = lm::solve(problem, coords.to_internal(start), opt.lm);
    ++runs;
    auto fitted = coords.to_model(r.x, kind, start.polarity);
    const bool better = std::isfinite(r.rss) && r.rss < best.rss;
    if (better) {
      best.rss = r.rss;
      best_lm = std::move(r);
      best_model = fitted;
    }
    return std::pair{fitted, better};
  };
  auto solve_x = [&](const detail::SpectrumProblem& p, const Eigen::VectorXd& x0) {
    ++runs;
    return lm::solve(p, x0, opt.lm).x;
  };

  for (SusceptibilityModel start : opt.extra_starts) {
    start.kind = kind;
    run(start);
  }

  // Per orientation: the shape-detected seed and the two-stage seed, then
  // jittered restarts around the better of the two fitted solutions.
  for (Polarity pol : {detected, detected == Polarity::absorption ? Polarity::transmission
                                                                  : Polarity::absorption}) {
    if (!opt.standard_starts) break;
    std::vector<double> f(smooth);
    if (pol == Polarity::transmission)
      for (auto& v : f) v = -v;
    const auto seeds = detail::seed_models(omega, f, baseline, pol);
    const auto& seed = kind == ModelKind::eit ? seeds.eit : seeds.ats;

    const auto from_seed = run(seed).first;
    const auto staged = detail::stagewise_seed(data, omega, seed, coords, opt.weights, solve_x);
    const auto from_staged = run(staged).first;

    const double rss_seed = detail::SpectrumProblem(data, kind, pol, coords, opt.weights)
                                .residual_norm2(coords.to_internal(from_seed));
    const double rss_staged = detail::SpectrumProblem(data, kind, pol, coords, opt.weights)
                                  .residual_norm2(coords.to_internal(from_staged));
    SusceptibilityModel centre = rss_staged < rss_seed ? from_staged : from_seed;
    std::mt19937_64 rng(opt.start_seed);
    for (int k = 0; k < opt.perturbed_starts; ++k) {
      auto [fitted, better] = run(detail::perturb(centre, rng));
      if (better) centre = fitted;
    }
  }
  if (!std::isfinite(best.rss)) throw DegenerateData("fit_model: every start diverged");

  best.kind = kind;
  best.n = static_cast<int>(2 * n);
  best.k = kModelParameters;
  best.weights = opt.weights;
  best.iterations = best_lm.iterations;
  best.gradient_norm = best_lm.gradient_norm;
  best.converged = best_lm.converged();
  best.stop_reason = lm::to_string(best_lm.stop);
  best.starts = runs;

  // Covariance: s^2 (J^T J)^-1 in internal coordinates, then mapped to
  // physical parameters through the diagonal coordinate Jacobian.
  const Eigen::MatrixXd& jac = best_lm.jacobian;
  Eigen::VectorXd colnorm(kModelParameters);
  for (int j = 0; j < kModelParameters; ++j) {
    const double cn = jac.col(j).norm();
    colnorm(j) = cn > 0.0 ? cn : 1.0;
  }
  const Eigen::MatrixXd js = jac * colnorm.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(js, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd inv_sq(kModelParameters);
  for (int j = 0; j < kModelParameters; ++j)
    inv_sq(j) = sv(j) > sv(0) * 1e-14 ? 1.0 / (sv(j) * sv(j)) : 0.0;
  const Eigen::MatrixXd cov_scaled = svd.matrixV() * inv_sq.asDiagonal() * svd.matrixV().transpose();
  const double dof = static_cast<double>(best.n - best.k);
  const double s2 = best.rss / dof;
  const Eigen::MatrixXd g = coords.jacobian(best_model) * colnorm.cwiseInverse().asDiagonal();
  best.covariance = s2 * g * cov_scaled * g.transpose();

  best.model = best_model;
  if (kind == ModelKind::ats) {
    best.model = canonical_ats(best_model);
    if (!(best.model.first == best_model.first)) {
      // Swap covariance rows/columns of the two Lorentzians.
      Eigen::VectorXi perm(kModelParameters);
      perm << 1, 0, 3, 2, 5, 4, 6, 7, 8;
      Eigen::MatrixXd swapped(kModelParameters, kModelParameters);
      for (int a = 0; a < kModelParameters; ++a)
        for (int b = 0; b < kModelParameters; ++b) swapped(a, b) = best.covariance(perm(a), perm(b));
      best.covariance = swapped;
    }
  }
  for (int j = 0; j < kModelParameters; ++j)
    best.standard_errors[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, best.covariance(j, j)));
  return best;
}

namespace detail {

// Every single Lorentzian of `fit`, embedded as a one-line start for the
// other model kind in each orientation that gives the line its fitted sign.
inline std::vector<SusceptibilityModel> single_line_starts(const FitResult& fit) {
  std::vector<SusceptibilityModel> out;
  const double pol = sign_of(fit.model.polarity);
  const double signs[2] = {pol, pol * fit.model.second_sign()};
  const Lorentzian lines[2] = {fit.model.first, fit.model.second};
  for (int i = 0; i < 2; ++i) {
    const Lorentzian& line = lines[i];
    const Lorentzian tiny{line.amplitude * 1e-9, line.center, line.width};
    SusceptibilityModel m = fit.model;
    // As the first line, its sign is the polarity.
    m.polarity = signs[i] > 0 ? Polarity::absorption : Polarity::transmission;
    m.first = line;
    m.second = tiny;
    out.push_back(m);
    // As the second line of an EIT model, its sign is minus the polarity.
    m.polarity = signs[i] > 0 ? Polarity::transmission : Polarity::absorption;
    m.first = tiny;
    m.second = line;
    out.push_back(m);
  }
  return out;
}

}  // namespace detail

// Fits both models for comparison. Each model is also started from the lines
// the other one found, so neither loses a one-line solution that both can
// represent only because its own search missed it.
inline std::array<FitResult, 2> fit_competing(const ComplexSpectrum& data, const FitOptions& opt = {}) {
  std::array<FitResult, 2> fits{fit_model(data, ModelKind::eit, opt), fit_model(data, ModelKind::ats, opt)};
  std::array<FitResult, 2> out = fits;
  for (int i = 0; i < 2; ++i) {
    FitOptions cross = opt;
    cross.standard_starts = false;
    cross.extra_starts = detail::single_line_starts(fits[static_cast<std::size_t>(1 - i)]);
    auto refit = fit_model(data, i == 0 ? ModelKind::eit : ModelKind::ats, cross);
    auto& cur = out[static_cast<std::size_t>(i)];
    if (refit.rss < cur.rss) {
      refit.starts += cur.starts;
      cur = std::move(refit);
    } else {
      cur.starts += refit.starts;
    }
  }
  return out;
}

}  // namespace eitlab

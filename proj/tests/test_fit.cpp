#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "eitlab/aic.hpp"
#include "eitlab/fit.hpp"
#include "eitlab/group_delay.hpp"
#include "eitlab/levenberg_marquardt.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace eitlab;

namespace {

// y = a exp(-b t) sampled on [0, 4].
struct ExpDecay {
  Eigen::VectorXd t, y;
  Eigen::Index residual_count() const { return t.size(); }
  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const Eigen::ArrayXd e = (-x(1) * t.array()).exp();
    r = (x(0) * e - y.array()).matrix();
    if (jac) {
      jac->col(0) = e.matrix();
      jac->col(1) = (-x(0) * t.array() * e).matrix();
    }
  }
};

double max_relative_error(const SusceptibilityModel& a, const SusceptibilityModel& b) {
  const auto va = parameter_vector(a), vb = parameter_vector(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i)
    worst = std::max(worst, std::abs(va[i] - vb[i]) / std::max(std::abs(va[i]), 1.0));
  return worst;
}

}  // namespace

TEST(LevenbergMarquardt, RecoversExponential) {
  ExpDecay p;
  p.t = Eigen::VectorXd::LinSpaced(40, 0.0, 4.0);
  p.y = (2.5 * (-1.3 * p.t.array()).exp()).matrix();
  const auto r = lm::solve(p, Eigen::Vector2d(1.0, 0.2));
  EXPECT_TRUE(r.converged()) << lm::to_string(r.stop);
  EXPECT_NEAR(r.x(0), 2.5, 1e-8);
  EXPECT_NEAR(r.x(1), 1.3, 1e-8);
}

TEST(LevenbergMarquardt, ZeroColumnFreezesParameter) {
  struct Frozen : ExpDecay {
    void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
      ExpDecay::evaluate(x, r, jac);
      if (jac) jac->col(1).setZero();
    }
  } p;
  p.t = Eigen::VectorXd::LinSpaced(40, 0.0, 4.0);
  p.y = (2.5 * (-1.3 * p.t.array()).exp()).matrix();
  const auto r = lm::solve(p, Eigen::Vector2d(1.0, 1.0));
  EXPECT_EQ(r.x(1), 1.0);
}

TEST(Fit, NoiseFreeRoundTripEit) {
  const auto truth = synth::eit_model();
  const auto fit = fit_model(synth::spectrum(truth, synth::grid()), ModelKind::eit);
  EXPECT_TRUE(fit.converged);
  EXPECT_LT(max_relative_error(truth, fit.model), 1e-6);
  EXPECT_EQ(fit.n, 2 * synth::kPoints);
  EXPECT_EQ(fit.k, kModelParameters);
}

TEST(Fit, NoiseFreeRoundTripAts) {
  const auto truth = synth::ats_model();
  const auto fit = fit_model(synth::spectrum(truth, synth::grid()), ModelKind::ats);
  EXPECT_TRUE(fit.converged);
  EXPECT_LT(max_relative_error(truth, canonical_ats(fit.model)), 1e-6);
}

TEST(Fit, CovarianceIsSymmetricPositive) {
  const auto data = add_noise(synth::spectrum(synth::eit_model(), synth::grid()), 30.0, 17);
  const auto fit = fit_model(data, ModelKind::eit);
  ASSERT_EQ(fit.covariance.rows(), kModelParameters);
  EXPECT_LT((fit.covariance - fit.covariance.transpose()).norm(), 1e-12 * fit.covariance.norm());
  for (int i = 0; i < kModelParameters; ++i) {
    EXPECT_GT(fit.covariance(i, i), 0.0);
    EXPECT_DOUBLE_EQ(fit.standard_errors[static_cast<std::size_t>(i)], std::sqrt(fit.covariance(i, i)));
  }
}

TEST(Fit, TooFewPointsRejected) {
  const auto data = synth::spectrum(synth::eit_model(), synth::grid(3 * kModelParameters - 1));
  EXPECT_THROW(fit_model(data, ModelKind::eit), InvalidArgument);
}

TEST(Fit, FlatMagnitudeIsDegenerate) {
  EXPECT_THROW(fit_model(synth::baseline_only(synth::grid()), ModelKind::ats), DegenerateData);
}

TEST(Fit, NegativeWidthFloorRejected) {
  FitOptions opt;
  opt.min_width_steps = -1.0;
  EXPECT_THROW(fit_model(synth::spectrum(synth::eit_model(), synth::grid()), ModelKind::eit, opt),
               InvalidArgument);
}

TEST(Fit, WidthsRespectFloor) {
  const auto data = add_noise(synth::baseline_only(synth::grid()), 30.0, 3);
  FitOptions opt;
  opt.min_width_steps = 2.0;
  const auto fit = fit_model(data, ModelKind::eit, opt);
  const auto w = synth::grid();
  const double floor = 2.0 * (w.back() - w.front()) / static_cast<double>(w.size() - 1);
  EXPECT_GE(fit.model.first.width, floor * (1.0 - 1e-12));
  EXPECT_GE(fit.model.second.width, floor * (1.0 - 1e-12));
}

TEST(Fit, CompetingFitsShareResidualDefinition) {
  const auto data = add_noise(synth::spectrum(synth::ats_model(), synth::grid()), 30.0, 8);
  const auto fits = fit_competing(data);
  EXPECT_EQ(fits[0].kind, ModelKind::eit);
  EXPECT_EQ(fits[1].kind, ModelKind::ats);
  EXPECT_EQ(fits[0].n, fits[1].n);
  // Cross-seeding never makes a fit worse than its own search.
  EXPECT_LE(fits[0].rss, fit_model(data, ModelKind::eit).rss * (1.0 + 1e-12));
  EXPECT_GT(aic_weights(fits).weight(ModelKind::ats), 0.99);
}

TEST(Aic, ValueAndWeights) {
  EXPECT_DOUBLE_EQ(aic_value(2.0, 100, 9), 100.0 * std::log(0.02) + 18.0);
  EXPECT_DOUBLE_EQ(aic_value(2.0, 100, 9, true), 100.0 * std::log(0.02) + 18.0 + 180.0 / 90.0);
  const std::vector<double> aic{10.0, 10.0};
  const auto w = akaike_weights(aic);
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  const std::vector<double> aic2{0.0, 2.0 * std::log(3.0)};
  const auto w2 = akaike_weights(aic2);
  EXPECT_NEAR(w2[0], 0.75, 1e-15);
  EXPECT_NEAR(w2[0] + w2[1], 1.0, 1e-15);
}

TEST(Aic, MismatchedResidualsRejected) {
  FitResult a, b;
  a.n = b.n = 100;
  a.rss = b.rss = 1.0;
  b.n = 98;
  std::vector<FitResult> v{a, b};
  EXPECT_THROW(aic_weights(v), MismatchedData);
  v[1].n = 100;
  v[1].weights.phase = 2.0;
  EXPECT_THROW(aic_weights(v), MismatchedData);
  v[1].weights.phase = 1.0;
  v[1].kind = ModelKind::ats;
  EXPECT_NO_THROW(aic_weights(v));
  EXPECT_THROW(aic_weights(std::vector<FitResult>{}), InvalidArgument);
}

TEST(Aic, ExactFitStaysFinite) {
  FitResult a, b;
  a.n = b.n = 100;
  b.kind = ModelKind::ats;
  a.rss = 0.0;
  b.rss = 1.0;
  const auto rep = aic_weights(std::vector<FitResult>{a, b});
  EXPECT_TRUE(std::isfinite(rep.entry(ModelKind::eit).aic));
  EXPECT_DOUBLE_EQ(rep.weight(ModelKind::eit), 1.0);
}

TEST(GroupDelay, MatchesFiniteDifferenceOfPhase) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto m = synth::eit_model();
  for (int s = 0; s < 50; ++s) {
    const double w = synth::center() + u(rng) * synth::width();
    const double h = 1e-4 * synth::width();
    const double fd = oracle::central_difference([&](double x) { return eval_ln_s21(m, x).imag(); }, w, h);
    EXPECT_NEAR(group_delay(m, w), -fd, 1e-6 * std::abs(fd));
  }
}

TEST(GroupDelay, BaselineOnlyGivesMinusC) {
  auto m = synth::eit_model();
  m.first.amplitude = m.second.amplitude = 0.0;
  const double tau = group_delay(m, synth::center());
  EXPECT_NEAR(group_velocity(tau, m.baseline.l_eff), -BaselineParams::c, 1e-6 * BaselineParams::c);
}

TEST(GroupDelay, ZeroDelayRejected) { EXPECT_THROW(group_velocity(0.0, 1.0), ZeroDelay); }

TEST(GroupDelay, WindowCenterSitsOnNarrowLine) {
  const auto m = synth::eit_model();
  const auto c = suppression_window_center(m);
  EXPECT_NEAR(c.omega_p, m.second.center, 0.01 * m.second.width);
  const std::vector<double> grid{synth::center() - synth::width(), synth::center()};
  const auto table = group_delay_table(m, grid);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_DOUBLE_EQ(table[1].tau_g, group_delay(m, synth::center()));
}

TEST(Spectrum, UnwrapIsIdempotentAndRemovesJumps) {
  std::vector<double> wrapped;
  for (int i = 0; i < 50; ++i) wrapped.push_back(std::remainder(0.4 * i, 2.0 * std::numbers::pi));
  const auto once = unwrap_phase(wrapped);
  for (std::size_t i = 1; i < once.size(); ++i) EXPECT_NEAR(once[i] - once[i - 1], 0.4, 1e-12);
  EXPECT_EQ(unwrap_phase(once), once);
}

TEST(Spectrum, RejectsInvalidPoints) {
  SpectrumPoint a, b;
  a.omega_p = b.omega_p = 1.0;
  EXPECT_THROW(ComplexSpectrum({a, b}), InvalidArgument);
  b.omega_p = 2.0;
  b.s21 = 0.0;
  EXPECT_THROW(ComplexSpectrum({a, b}), InvalidArgument);
  b.s21 = {std::nan(""), 0.0};
  EXPECT_THROW(ComplexSpectrum({a, b}), InvalidArgument);
}

TEST(Spectrum, NoiseIsSeededAndScaled) {
  const auto clean = synth::spectrum(synth::eit_model(), synth::grid());
  const auto a = add_noise(clean, 20.0, 5), b = add_noise(clean, 20.0, 5), c = add_noise(clean, 20.0, 6);
  double power = 0.0, noise = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_EQ(a[i].s21, b[i].s21);
    diff += std::abs(a[i].s21 - c[i].s21);
    power += std::norm(clean[i].s21);
    noise += std::norm(a[i].s21 - clean[i].s21);
  }
  EXPECT_GT(diff, 0.0);
  EXPECT_NEAR(10.0 * std::log10(power / noise), 20.0, 1.0);
}

TEST(Spectrum, LinearPhaseRemoval) {
  const auto d = remove_linear_phase(synth::baseline_only(synth::grid()));
  for (const auto& p : d.points()) EXPECT_NEAR(p.phase, d[0].phase, 1e-9);
}

TEST(Aic, WeightsNormalizedAndMonotone) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int s = 0; s < 100; ++s) {
    std::vector<double> aic{u(rng), u(rng), u(rng)};
    const auto w = akaike_weights(aic);
    EXPECT_NEAR(w[0] + w[1] + w[2], 1.0, 1e-12);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (aic[i] < aic[j]) {
          EXPECT_GE(w[i], w[j]);
        }
      }
    }
  }
}

TEST(Fit, AtsCanonicalUnderLineSwap) {
  const auto truth = synth::ats_model();
  const auto data = add_noise(synth::spectrum(truth, synth::grid()), 30.0, 13);
  SusceptibilityModel swapped = truth;
  std::swap(swapped.first, swapped.second);
  FitOptions a, b;
  a.standard_starts = b.standard_starts = false;
  a.extra_starts = {truth};
  b.extra_starts = {swapped};
  const auto fa = canonical_ats(fit_model(data, ModelKind::ats, a).model);
  const auto fb = canonical_ats(fit_model(data, ModelKind::ats, b).model);
  EXPECT_LT(max_relative_error(fa, fb), 1e-6);
  EXPECT_LT(fa.first.center, fa.second.center);
}

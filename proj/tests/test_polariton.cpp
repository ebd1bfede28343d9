#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eitlab/polariton.hpp"
#include "oracles.hpp"

using namespace eitlab;
using namespace eitlab::units;

namespace {

DeviceParams reference_device() {
  return DeviceParams::from_n0_transition(ghz_2pi(5.648), ghz_2pi(6.485), mhz_2pi(1.54), 1.0 / 35e-6,
                                          mhz_2pi(0.82), 0.0103);
}

// Midpoint of the n = 0 and n = 1 qubit lines, where delta0 = delta1 = chi.
double midpoint_drive(const DeviceParams& d) { return 0.5 * (d.n0_transition() + d.n1_transition()); }

}  // namespace

TEST(Polariton, BlocksMatchJacobiOracle) {
  const auto dev = reference_device();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> off(-2.0, 2.0), rabi(0.0, 5.0);
  for (int s = 0; s < 200; ++s) {
    const PolaritonDrive drive{midpoint_drive(dev) + mhz_2pi(off(rng)), mhz_2pi(rabi(rng))};
    const auto sys = build_polaritons(dev, drive);
    const auto blocks = {zero_photon_block(sys.angles, drive.rabi), one_photon_block(dev, sys.angles, drive.rabi)};
    int b = 0;
    for (const auto& blk : blocks) {
      Eigen::MatrixXd m(2, 2);
      m << blk.diag_g, blk.coupling, blk.coupling, blk.diag_e;
      const auto ev = oracle::jacobi_eigenvalues(m);
      const double scale = std::max(1.0, std::abs(ev(1)));
      EXPECT_NEAR(sys.energies[static_cast<std::size_t>(2 * b)], ev(0), 1e-12 * scale);
      EXPECT_NEAR(sys.energies[static_cast<std::size_t>(2 * b + 1)], ev(1), 1e-12 * scale);
      ++b;
    }
  }
}

TEST(Polariton, EigenvectorsAreNormalizedAndPhaseFixed) {
  const auto dev = reference_device();
  const auto sys = build_polaritons(dev, {ghz_2pi(5.6466), mhz_2pi(1.46)});
  for (const auto& a : sys.amplitudes) {
    EXPECT_NEAR(a.g * a.g + a.e * a.e, 1.0, 1e-14);
    EXPECT_TRUE(a.g > 0.0 || (a.g == 0.0 && a.e >= 0.0));
  }
  // Orthogonal within each block.
  EXPECT_NEAR(sys.amplitudes[0].g * sys.amplitudes[1].g + sys.amplitudes[0].e * sys.amplitudes[1].e, 0.0, 1e-14);
  EXPECT_NEAR(sys.amplitudes[2].g * sys.amplitudes[3].g + sys.amplitudes[2].e * sys.amplitudes[3].e, 0.0, 1e-14);
}

TEST(Polariton, SplittingIsHypotOfDetuningAndDrive) {
  const auto dev = reference_device();
  const PolaritonDrive drive{ghz_2pi(5.6466), mhz_2pi(1.46)};
  const auto sys = build_polaritons(dev, drive);
  const double d0 = sys.angles.delta0, d1 = sys.angles.delta1;
  EXPECT_NEAR(sys.energies[1] - sys.energies[0], std::hypot(d0, drive.rabi), 1e-4);
  EXPECT_NEAR(sys.energies[3] - sys.energies[2], std::hypot(d1, drive.rabi), 1e-4);
}

TEST(Polariton, EqualAnglesAtMidpoint) {
  const auto dev = reference_device();
  const auto sys = build_polaritons(dev, {midpoint_drive(dev), mhz_2pi(1.0)});
  EXPECT_NEAR(sys.angles.delta0, sys.angles.delta1, 1e-3);
  EXPECT_NEAR(sys.angles.theta0, sys.angles.theta1, 1e-12);
}

TEST(Polariton, MixingAnglesInHalfOpenRange) {
  const auto dev = reference_device();
  for (double off : {-6.0, -3.0, 0.0, 3.0, 6.0})
    for (double rabi : {0.0, 0.5, 3.0}) {
      const auto m = mixing_angles(dev, {midpoint_drive(dev) + mhz_2pi(off), mhz_2pi(rabi)});
      EXPECT_GE(m.theta0, 0.0);
      EXPECT_LT(m.theta0, std::numbers::pi);
      EXPECT_GE(m.theta1, 0.0);
      EXPECT_LT(m.theta1, std::numbers::pi);
    }
}

TEST(Polariton, DegenerateWhenUndrivenOnResonance) {
  const auto dev = reference_device();
  const auto m = mixing_angles(dev, {dev.n0_transition(), 0.0});
  EXPECT_TRUE(m.degenerate);
  EXPECT_DOUBLE_EQ(m.theta0, 0.0);
  EXPECT_FALSE(mixing_angles(dev, {dev.n0_transition(), mhz_2pi(0.1)}).degenerate);
}

TEST(Polariton, CavityDecaySplitsExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto dev = reference_device();
  for (int s = 0; s < 1000; ++s) {
    const PolaritonDrive drive{midpoint_drive(dev) + mhz_2pi(8.0 * (u(rng) - 0.5)), mhz_2pi(6.0 * u(rng))};
    const auto r = build_polaritons(dev, drive).decay_rates;
    EXPECT_NEAR(r.gamma_31 + r.gamma_32, dev.gamma_c, 1e-12 * dev.gamma_c);
    EXPECT_GE(r.gamma_31, 0.0);
    EXPECT_GE(r.gamma_32, 0.0);
    EXPECT_GE(r.gamma_21, 0.0);
    EXPECT_LE(r.gamma_21, dev.gamma_q);
  }
}

TEST(Polariton, QubitDecayFullyDressedOffWhenUndriven) {
  const auto dev = reference_device();
  // Undriven and below the n = 0 line: theta0 = 0, so gamma_21 = gamma_q.
  const auto r = build_polaritons(dev, {midpoint_drive(dev), 0.0}).decay_rates;
  EXPECT_NEAR(r.gamma_21, dev.gamma_q, 1e-12 * dev.gamma_q);
}

TEST(Polariton, NestingOrderingInsideWindow) {
  const auto dev = reference_device();
  const double wd = ghz_2pi(5.6466);
  ASSERT_TRUE(in_nesting_regime(dev, wd));
  for (double rabi_mhz = 0.1; rabi_mhz <= 5.0; rabi_mhz += 0.1) {
    const auto sys = build_polaritons(dev, {wd, mhz_2pi(rabi_mhz)});
    ASSERT_GT(sys.angles.delta1, sys.angles.delta0);
    const auto& t = sys.transitions;
    EXPECT_LT(t.omega_23, t.omega_13);
    EXPECT_LT(t.omega_13, t.omega_24);
    EXPECT_LT(t.omega_24, t.omega_14);
    EXPECT_TRUE(sys.nesting);
  }
}

TEST(Polariton, OutsideWindowNotNesting) {
  const auto dev = reference_device();
  EXPECT_FALSE(in_nesting_regime(dev, dev.n0_transition() + mhz_2pi(1.0)));
  EXPECT_FALSE(in_nesting_regime(dev, dev.n1_transition() - mhz_2pi(1.0)));
}

TEST(Polariton, EitConditionComparesToCavityWidth) {
  const auto dev = reference_device();
  EXPECT_TRUE(eit_condition(mhz_2pi(0.2), dev));
  EXPECT_FALSE(eit_condition(mhz_2pi(1.0), dev));
}

TEST(Polariton, InvalidInputsRejected) {
  auto dev = reference_device();
  dev.gamma_c = 0.0;
  EXPECT_THROW(build_polaritons(dev, {ghz_2pi(5.6466), 1.0}), InvalidArgument);
  dev = reference_device();
  EXPECT_THROW(build_polaritons(dev, {ghz_2pi(5.6466), -1.0}), InvalidArgument);
  dev.omega_r = dev.omega_q + 5.0 * dev.chi;  // not dispersive
  EXPECT_THROW(build_polaritons(dev, {ghz_2pi(5.6466), 1.0}), InvalidArgument);
  const std::vector<double> empty;
  EXPECT_THROW(transition_curves(reference_device(), ghz_2pi(5.6466), empty), InvalidArgument);
}

TEST(Polariton, TransitionCurvesFollowGrid) {
  const std::vector<double> grid{0.0, mhz_2pi(1.0), mhz_2pi(2.0)};
  const auto rows = transition_curves(reference_device(), ghz_2pi(5.6466), grid);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(rows[i].rabi, grid[i]);
  // The 1-3 and 2-3 lines move apart as the drive grows.
  EXPECT_GT(rows[2].transitions.omega_13 - rows[2].transitions.omega_23,
            rows[1].transitions.omega_13 - rows[1].transitions.omega_23);
}

TEST(Polariton, DetuningsSumToTwoChi) {
  const auto dev = reference_device();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> off(-20.0, 20.0);
  const double ulp = std::nextafter(dev.omega_q, INFINITY) - dev.omega_q;
  for (int s = 0; s < 1000; ++s) {
    const auto m = mixing_angles(dev, {midpoint_drive(dev) + mhz_2pi(off(rng)), mhz_2pi(1.0)});
    EXPECT_LE(std::abs(m.delta0 + m.delta1 - 2.0 * dev.chi), 4.0 * ulp);
  }
}

TEST(Polariton, AmplitudesAreBlockEigenvectors) {
  const auto dev = reference_device();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> off(-3.0, 3.0), rabi(0.0, 4.0);
  for (int s = 0; s < 200; ++s) {
    const PolaritonDrive drive{midpoint_drive(dev) + mhz_2pi(off(rng)), mhz_2pi(rabi(rng))};
    const auto sys = build_polaritons(dev, drive);
    const Block2 blocks[2] = {zero_photon_block(sys.angles, drive.rabi),
                              one_photon_block(dev, sys.angles, drive.rabi)};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& b = blocks[k / 2];
      const auto& v = sys.amplitudes[k];
      const double e = sys.energies[k];
      const double hg = b.diag_g * v.g + b.coupling * v.e;
      const double he = b.coupling * v.g + b.diag_e * v.e;
      EXPECT_LE(std::hypot(hg - e * v.g, he - e * v.e), 1e-10 * std::max(std::abs(e), 1.0));
    }
  }
}

TEST(Polariton, ProbeSplittingGrowsWithDrive) {
  const auto dev = reference_device();
  const double wd = ghz_2pi(5.6466);
  double prev = -INFINITY;
  for (double rabi_mhz = 0.0; rabi_mhz <= 2.8; rabi_mhz += 0.05) {
    const auto t = build_polaritons(dev, {wd, mhz_2pi(rabi_mhz)}).transitions;
    EXPECT_GT(t.omega_13 - t.omega_23, prev);
    prev = t.omega_13 - t.omega_23;
  }
}

TEST(Polariton, TransitionsContinuousAtZeroDrive) {
  const auto dev = reference_device();
  const double wd = ghz_2pi(5.6466);
  const std::vector<double> grid{0.0, 1e-6};
  const auto rows = transition_curves(dev, wd, grid);
  const auto& a = rows[0].transitions;
  const auto& b = rows[1].transitions;
  const double tol = 1e-9 * a.omega_14;
  EXPECT_NEAR(a.omega_13, b.omega_13, tol);
  EXPECT_NEAR(a.omega_23, b.omega_23, tol);
  EXPECT_NEAR(a.omega_14, b.omega_14, tol);
  EXPECT_NEAR(a.omega_24, b.omega_24, tol);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "eitlab/units.hpp"
#include "eitlab/workbench/config.hpp"

using namespace eitlab;
using namespace eitlab::workbench;

TEST(Units, HzRoundTrip) {
  for (double f : {0.0, 1.0, 6.485e9, 3.3e-3}) EXPECT_DOUBLE_EQ(units::rad_to_hz(units::hz_to_rad(f)), f);
  EXPECT_DOUBLE_EQ(units::mhz_2pi(1.0), units::hz_to_rad(1e6));
  EXPECT_DOUBLE_EQ(units::ghz_2pi(1.0), units::khz_2pi(1e6));
}

TEST(Units, SuffixParsing) {
  EXPECT_EQ(units::frequency_unit_from_suffix("hz"), units::FrequencyUnit::hz);
  EXPECT_EQ(units::frequency_unit_from_suffix("mhz_2pi"), units::FrequencyUnit::mhz_2pi);
  EXPECT_EQ(units::frequency_unit_from_suffix("rads"), units::FrequencyUnit::rads);
  EXPECT_FALSE(units::frequency_unit_from_suffix("MHz").has_value());
  EXPECT_DOUBLE_EQ(units::to_angular(2.0, units::FrequencyUnit::mhz_2pi), units::mhz_2pi(2.0));
  EXPECT_DOUBLE_EQ(units::to_angular(5.0, units::FrequencyUnit::rads), 5.0);
}

namespace {

constexpr const char* kDevice = R"([device]
qubit_n0_transition = 5.648e9 hz
resonator = 6.485e9 hz
chi = 1.54 mhz_2pi
gamma_c = 0.82 mhz_2pi
t1 = 35e-6 s
line_length = 0.0103 m
)";

// Message of the ConfigError thrown by parse_config(text), or "" if none.
std::string config_error(const std::string& text) {
  try {
    parse_config(text, "test.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ParsesDeviceWithUnits) {
  const auto c = parse_config(kDevice);
  ASSERT_TRUE(c.device.has_value());
  EXPECT_DOUBLE_EQ(c.device->chi, units::mhz_2pi(1.54));
  EXPECT_DOUBLE_EQ(c.device->n0_transition(), units::hz_to_rad(5.648e9));
  EXPECT_DOUBLE_EQ(c.device->gamma_q, 1.0 / 35e-6);
  EXPECT_DOUBLE_EQ(c.device->line_length_l, 0.0103);
}

TEST(Config, UnknownKeyReportsLine) {
  const auto msg = config_error(std::string(kDevice) + "colour = 3\n");
  EXPECT_NE(msg.find("test.ini:8"), std::string::npos) << msg;
  EXPECT_NE(msg.find("colour"), std::string::npos) << msg;
}

TEST(Config, UnknownSectionRejected) {
  EXPECT_NE(config_error("[devcie]\nchi = 1 hz\n").find("test.ini:1"), std::string::npos);
}

TEST(Config, MissingUnitRejected) {
  const auto msg = config_error("[drive]\nfrequency = 5e9\nrabi = 1 mhz_2pi\n");
  EXPECT_NE(msg.find("test.ini:2"), std::string::npos) << msg;
}

TEST(Config, WrongUnitKindRejected) {
  EXPECT_FALSE(config_error("[drive]\nfrequency = 5e9 m\nrabi = 1 mhz_2pi\n").empty());
}

TEST(Config, DuplicateKeyRejected) {
  const auto msg = config_error("[drive]\nfrequency = 5e9 hz\nfrequency = 5e9 hz\nrabi = 0 hz\n");
  EXPECT_NE(msg.find("test.ini:3"), std::string::npos) << msg;
}

TEST(Config, MalformedNumberRejected) {
  const auto msg = config_error("[drive]\nfrequency = 5e9x hz\nrabi = 0 hz\n");
  EXPECT_NE(msg.find("test.ini:2"), std::string::npos) << msg;
}

TEST(Config, ExactlyOneQubitFrequency) {
  std::string both(kDevice);
  both += "omega_q = 5.65e9 hz\n";
  EXPECT_FALSE(config_error(both).empty());
}

TEST(Config, NonDispersiveDeviceRejected) {
  const std::string text = R"([device]
omega_q = 6.48e9 hz
resonator = 6.485e9 hz
chi = 1.54 mhz_2pi
gamma_c = 0.82 mhz_2pi
gamma_q = 1e4 rads
line_length = 0.01 m
)";
  EXPECT_NE(config_error(text).find("dispersive"), std::string::npos);
}

TEST(Config, AxisNeedsIncreasingRange) {
  EXPECT_FALSE(config_error("[sweep.probe]\nstart = 1 mhz_2pi\nstop = -1 mhz_2pi\npoints = 11\n").empty());
  EXPECT_FALSE(config_error("[sweep.probe]\nstart = -1 mhz_2pi\nstop = 1 mhz_2pi\npoints = 1\n").empty());
}

TEST(Config, AxisValuesAreInclusive) {
  const auto c = parse_config("[sweep.probe]\nstart = -1 rads\nstop = 1 rads\npoints = 5\n");
  ASSERT_TRUE(c.probe_axis.has_value());
  const auto v = c.probe_axis->values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v.front(), -1.0);
  EXPECT_DOUBLE_EQ(v[2], 0.0);
  EXPECT_DOUBLE_EQ(v.back(), 1.0);
}

TEST(Config, FitSettingsMapToOptions) {
  const auto c = parse_config(
      "[fit]\nweight_magnitude = 2\nweight_phase = 0.5\npoint_weighting = none\nmin_width_steps = 1\n");
  const auto o = fit_options(c.fit);
  EXPECT_DOUBLE_EQ(o.weights.magnitude, 2.0);
  EXPECT_DOUBLE_EQ(o.weights.phase, 0.5);
  EXPECT_FALSE(o.weights.by_magnitude);
  EXPECT_DOUBLE_EQ(o.min_width_steps, 1.0);
  EXPECT_FALSE(config_error("[fit]\nmin_width_steps = -1\n").empty());
  EXPECT_FALSE(config_error("[fit]\npoint_weighting = cubic\n").empty());
}

TEST(Config, CommentsAndBlankLinesIgnored) {
  const auto c = parse_config("# header\n\n[noise]  ; trailing\nsnr_db = 25 db # note\nseed = 7\n");
  ASSERT_TRUE(c.noise.has_value());
  EXPECT_DOUBLE_EQ(c.noise->snr_db, 25.0);
  EXPECT_EQ(c.noise->seed, 7u);
}

TEST(Config, ResolveLambdaFromPolaritons) {
  const auto c = parse_config(std::string(kDevice) +
                              "[drive]\nfrequency = 5.6466e9 hz\nrabi = 1.46 mhz_2pi\n"
                              "[lambda]\nprobe_rabi = 0.005 mhz_2pi\ncontrol_rabi = 0.2 mhz_2pi\n");
  const auto r = resolve_lambda(c);
  ASSERT_TRUE(r.polaritons.has_value());
  EXPECT_GT(r.config.omega_13, r.config.omega_23);
  EXPECT_DOUBLE_EQ(r.config.gamma_31, r.polaritons->decay_rates.gamma_31);
}

TEST(Config, ResolveLambdaNeedsFrequencies) {
  const auto c = parse_config("[lambda]\nprobe_rabi = 1 mhz_2pi\n");
  EXPECT_THROW(resolve_lambda(c), ConfigError);
}

TEST(Units, HzRoundTripWithinOneUlp) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> e(0.0, 11.0);
  for (int s = 0; s < 10000; ++s) {
    const double f = std::pow(10.0, e(rng));
    const double back = units::rad_to_hz(units::hz_to_rad(f));
    EXPECT_LE(std::abs(back - f), std::nextafter(f, INFINITY) - f);
  }
}

#pragma once

// Versioned JSON run reports. Frequencies are written as ordinary hertz
// (omega / 2 pi); every other quantity is SI.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eitlab/aic.hpp"
#include "eitlab/errors.hpp"
#include "eitlab/fit.hpp"
#include "eitlab/lambda_system.hpp"
#include "eitlab/polariton.hpp"
#include "eitlab/units.hpp"
#include "eitlab/workbench/config.hpp"
#include "eitlab/workbench/io.hpp"

#ifndef EITLAB_VERSION
#define EITLAB_VERSION "0.0.0"
#endif

namespace eitlab::workbench {

using json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = EITLAB_VERSION;

inline double hz(double rad_per_s) { return units::rad_to_hz(rad_per_s); }

// UTC time in ISO 8601. SOURCE_DATE_EPOCH, when set, replaces the clock.
inline std::string report_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json config_echo(const WorkbenchConfig& c) {
  json normalized = json::object();
  for (const auto& e : c.file.entries()) {
    json& sec = normalized[e.section];
    if (e.kind == ValueKind::text)
      sec[e.key] = e.text;
    else if (e.kind == ValueKind::boolean)
      sec[e.key] = e.numbers.front() != 0.0;
    else if (e.kind == ValueKind::frequency_list)
      sec[e.key + "_rad_s"] = e.numbers;
    else if (e.kind == ValueKind::frequency)
      sec[e.key + "_rad_s"] = e.numbers.front();
    else
      sec[e.key] = e.numbers.front();
  }
  return {{"source", c.file.source()},
          {"hash_fnv1a64", hex64(fnv1a64(c.file.text()))},
          {"text", c.file.text()},
          {"normalized", normalized}};
}

inline json file_echo(const std::filesystem::path& path) {
  return {{"path", path.string()}, {"hash_fnv1a64", hex64(fnv1a64(read_file(path)))}};
}

// Skeleton every command fills in. The configuration hash covers the config
// text, so identical files hash identically wherever they live.
inline json make_report(std::string command, const WorkbenchConfig* cfg) {
  json r;
  r["schema"] = "eitlab.run_report";
  r["schema_version"] = kReportSchemaVersion;
  r["tool"] = {{"name", "eitlab"}, {"version", kToolVersion}};
  r["command"] = std::move(command);
  r["timestamp"] = report_timestamp();
  r["config_hash"] = cfg ? hex64(fnv1a64(cfg->file.text())) : std::string();
  r["inputs"] = json::object();
  if (cfg) r["inputs"]["config"] = config_echo(*cfg);
  r["log"] = json::array();
  r["results"] = json::object();
  return r;
}

// Report text for comparisons that must ignore the wall clock.
inline json without_timestamp(json r) {
  r.erase("timestamp");
  return r;
}

inline void write_report(const std::filesystem::path& path, const json& report) {
  write_file_atomic(path, report.dump(2) + "\n");
}

inline json read_report(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json r;
  try {
    r = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": not valid JSON (" + e.what() + ")");
  }
  if (!r.is_object() || r.value("schema", std::string()) != "eitlab.run_report")
    throw FormatError(path.string() + ": not an eitlab run report");
  if (r.value("schema_version", 0) != kReportSchemaVersion)
    throw FormatError(path.string() + ": unsupported report schema version");
  return r;
}

inline json to_json(const MixingAngles& m) {
  return {{"theta0_rad", m.theta0},
          {"theta1_rad", m.theta1},
          {"delta0_hz", hz(m.delta0)},
          {"delta1_hz", hz(m.delta1)},
          {"degenerate", m.degenerate}};
}

inline json to_json(const DecayRates& r) {
  return {{"gamma_31_hz", hz(r.gamma_31)}, {"gamma_32_hz", hz(r.gamma_32)}, {"gamma_21_hz", hz(r.gamma_21)}};
}

inline json to_json(const ProbeTransitions& t) {
  return {{"omega_13_hz", hz(t.omega_13)},
          {"omega_23_hz", hz(t.omega_23)},
          {"omega_14_hz", hz(t.omega_14)},
          {"omega_24_hz", hz(t.omega_24)}};
}

inline json to_json(const PolaritonSystem& s) {
  json energies = json::array();
  for (double e : s.energies) energies.push_back(hz(e));
  json states = json::array();
  for (const auto& a : s.amplitudes) states.push_back({{"g", a.g}, {"e", a.e}});
  return {{"mixing_angles", to_json(s.angles)},
          {"energies_hz", energies},
          {"states", states},
          {"decay_rates", to_json(s.decay_rates)},
          {"transitions", to_json(s.transitions)},
          {"nesting", s.nesting}};
}

inline json to_json(const LambdaConfig& c) {
  return {{"omega_13_hz", hz(c.omega_13)},     {"omega_23_hz", hz(c.omega_23)},
          {"gamma_31_hz", hz(c.gamma_31)},     {"gamma_32_hz", hz(c.gamma_32)},
          {"gamma_21_hz", hz(c.gamma_21)},     {"gamma_phi2_hz", hz(c.gamma_phi2)},
          {"gamma_phi3_hz", hz(c.gamma_phi3)}, {"probe_rabi_hz", hz(c.probe_rabi)},
          {"probe_frequency_hz", hz(c.omega_p)}, {"control_rabi_hz", hz(c.control_rabi)},
          {"control_frequency_hz", hz(c.omega_c)}};
}

inline json to_json(const DensityMatrix3& rho) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < 3; ++i) {
    json rr = json::array(), ii = json::array();
    for (int j = 0; j < 3; ++j) {
      rr.push_back(rho(i, j).real());
      ii.push_back(rho(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"real", re},
          {"imag", im},
          {"hermiticity_error", rho.hermiticity_error()},
          {"trace_error", rho.trace_error()},
          {"min_eigenvalue", rho.min_eigenvalue()}};
}

// Report names and unit conversion factors for kParameterNames.
inline constexpr std::array<const char*, kModelParameters> kReportParameterNames = {
    "amplitude_1_hz", "amplitude_2_hz", "center_1_hz", "center_2_hz", "width_1_hz",
    "width_2_hz",     "l_eff_m",        "alpha0",      "phi0_rad"};

inline std::array<double, kModelParameters> report_parameter_scale() {
  const double f = 1.0 / units::two_pi;
  return {f, f, f, f, f, f, 1.0, 1.0, 1.0};
}

inline json to_json(const FitResult& r) {
  const auto scale = report_parameter_scale();
  const auto values = parameter_vector(r.model);
  json params = json::object(), errors = json::object(), cov = json::array();
  for (int i = 0; i < kModelParameters; ++i) {
    const auto u = static_cast<std::size_t>(i);
    params[kReportParameterNames[u]] = values[u] * scale[u];
    errors[kReportParameterNames[u]] = r.standard_errors[u] * scale[u];
    json row = json::array();
    for (int j = 0; j < kModelParameters; ++j)
      row.push_back(r.covariance.size() ? r.covariance(i, j) * scale[u] * scale[static_cast<std::size_t>(j)]
                                        : 0.0);
    cov.push_back(row);
  }
  return {{"model", std::string(to_string(r.kind))},
          {"polarity", r.model.polarity == Polarity::absorption ? "absorption" : "transmission"},
          {"parameters", params},
          {"standard_errors", errors},
          {"covariance", cov},
          {"rss", r.rss},
          {"n", r.n},
          {"k", r.k},
          {"weights",
           {{"magnitude", r.weights.magnitude},
            {"phase", r.weights.phase},
            {"point_weighting", r.weights.by_magnitude ? "magnitude" : "none"}}},
          {"converged", r.converged},
          {"stop_reason", r.stop_reason},
          {"iterations", r.iterations},
          {"gradient_norm", r.gradient_norm},
          {"starts", r.starts}};
}

// Rebuilds the fitted model and statistics from a report entry.
inline FitResult fit_from_json(const json& j) {
  try {
    FitResult r;
    r.kind = model_kind_from_string(j.at("model").get<std::string>());
    const auto pol = j.at("polarity").get<std::string>();
    if (pol != "absorption" && pol != "transmission") throw FormatError("unknown polarity '" + pol + "'");
    const auto scale = report_parameter_scale();
    std::array<double, kModelParameters> v{}, se{};
    for (int i = 0; i < kModelParameters; ++i) {
      const auto u = static_cast<std::size_t>(i);
      v[u] = j.at("parameters").at(kReportParameterNames[u]).get<double>() / scale[u];
      se[u] = j.at("standard_errors").at(kReportParameterNames[u]).get<double>() / scale[u];
    }
    SusceptibilityModel m;
    m.kind = r.kind;
    m.polarity = pol == "absorption" ? Polarity::absorption : Polarity::transmission;
    m.first = {v[0], v[2], v[4]};
    m.second = {v[1], v[3], v[5]};
    m.baseline = {v[6], v[7], v[8]};
    m.validate();
    r.model = m;
    r.standard_errors = se;
    r.rss = j.at("rss").get<double>();
    r.n = j.at("n").get<int>();
    r.k = j.at("k").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.stop_reason = j.value("stop_reason", std::string());
    r.iterations = j.value("iterations", 0);
    const auto& w = j.at("weights");
    r.weights.magnitude = w.at("magnitude").get<double>();
    r.weights.phase = w.at("phase").get<double>();
    r.weights.by_magnitude = w.at("point_weighting").get<std::string>() == "magnitude";
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed fit entry: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("malformed fit entry: ") + e.what());
  }
}

inline json to_json(const AicReport& a) {
  json entries = json::array();
  for (const auto& e : a.entries)
    entries.push_back({{"model", std::string(to_string(e.kind))},
                       {"aic", e.aic},
                       {"delta", e.delta},
                       {"weight", e.weight}});
  return {{"small_sample_correction", a.small_sample_correction}, {"entries", entries}};
}

}  // namespace eitlab::workbench

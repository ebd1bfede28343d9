#pragma once

// Workbench configuration: INI-style text with nested section names and an
// explicit unit on every dimensioned value.
//
//   # comment
//   [device]
//   qubit_n0_transition = 5.648e9 hz
//   chi = 1.54 mhz_2pi
//   t1 = 35e-6 s
//   [sweep.control]
//   values = 0.04 0.2 0.4 0.82 mhz_2pi
//
// Frequencies take hz | mhz_2pi | rads, lengths m, times s, phases rad,
// signal-to-noise ratios db. Dimensionless values take no suffix.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/fit.hpp"
#include "eitlab/lambda_system.hpp"
#include "eitlab/polariton.hpp"
#include "eitlab/units.hpp"

namespace eitlab::workbench {

enum class ValueKind { frequency, frequency_list, length, time, phase, decibel, real, integer, boolean, text };

struct KeySpec {
  std::string_view section;
  std::string_view key;
  ValueKind kind;
};

inline constexpr KeySpec kSchema[] = {
    {"device", "qubit_n0_transition", ValueKind::frequency},
    {"device", "omega_q", ValueKind::frequency},
    {"device", "resonator", ValueKind::frequency},
    {"device", "chi", ValueKind::frequency},
    {"device", "gamma_c", ValueKind::frequency},
    {"device", "gamma_q", ValueKind::frequency},
    {"device", "t1", ValueKind::time},
    {"device", "line_length", ValueKind::length},
    {"device", "coupling_g", ValueKind::frequency},
    {"device", "anharmonicity", ValueKind::frequency},
    {"drive", "frequency", ValueKind::frequency},
    {"drive", "rabi", ValueKind::frequency},
    {"lambda", "omega_13", ValueKind::frequency},
    {"lambda", "omega_23", ValueKind::frequency},
    {"lambda", "probe_rabi", ValueKind::frequency},
    {"lambda", "control_rabi", ValueKind::frequency},
    {"lambda", "probe_detuning", ValueKind::frequency},
    {"lambda", "control_detuning", ValueKind::frequency},
    {"lambda", "gamma_31", ValueKind::frequency},
    {"lambda", "gamma_32", ValueKind::frequency},
    {"lambda", "gamma_21", ValueKind::frequency},
    {"lambda", "gamma_phi2", ValueKind::frequency},
    {"lambda", "gamma_phi3", ValueKind::frequency},
    {"sweep.probe", "start", ValueKind::frequency},
    {"sweep.probe", "stop", ValueKind::frequency},
    {"sweep.probe", "points", ValueKind::integer},
    {"sweep.control", "values", ValueKind::frequency_list},
    {"sweep.drive", "start", ValueKind::frequency},
    {"sweep.drive", "stop", ValueKind::frequency},
    {"sweep.drive", "points", ValueKind::integer},
    {"sweep.fidelity", "probe_start", ValueKind::frequency},
    {"sweep.fidelity", "probe_stop", ValueKind::frequency},
    {"sweep.fidelity", "probe_points", ValueKind::integer},
    {"sweep.fidelity", "control_start", ValueKind::frequency},
    {"sweep.fidelity", "control_stop", ValueKind::frequency},
    {"sweep.fidelity", "control_points", ValueKind::integer},
    {"mapping", "scale", ValueKind::frequency},
    {"mapping", "l_eff", ValueKind::length},
    {"mapping", "alpha0", ValueKind::real},
    {"mapping", "phi0", ValueKind::phase},
    {"noise", "snr_db", ValueKind::decibel},
    {"noise", "seed", ValueKind::integer},
    {"fit", "weight_magnitude", ValueKind::real},
    {"fit", "weight_phase", ValueKind::real},
    {"fit", "point_weighting", ValueKind::text},
    {"fit", "detrend", ValueKind::boolean},
    {"fit", "small_sample", ValueKind::boolean},
    {"fit", "perturbed_starts", ValueKind::integer},
    {"fit", "l_eff_guess", ValueKind::length},
    {"fit", "min_width_steps", ValueKind::real},
    {"output", "dir", ValueKind::text},
};

// One parsed `key = value` line, with values already in SI / rad/s.
struct Entry {
  std::string section;
  std::string key;
  ValueKind kind = ValueKind::real;
  std::vector<double> numbers;
  std::string text;
  int line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) noexcept {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline const KeySpec* find_key(std::string_view section, std::string_view key) noexcept {
  for (const auto& k : kSchema)
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

inline bool known_section(std::string_view section) noexcept {
  for (const auto& k : kSchema)
    if (k.section == section) return true;
  return false;
}

[[noreturn]] inline void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

inline std::string_view unit_name(ValueKind k) noexcept {
  switch (k) {
    case ValueKind::frequency:
    case ValueKind::frequency_list: return "hz | mhz_2pi | rads";
    case ValueKind::length: return "m";
    case ValueKind::time: return "s";
    case ValueKind::phase: return "rad";
    case ValueKind::decibel: return "db";
    default: return "none";
  }
}

inline Entry parse_value(const KeySpec& spec, std::string_view value, const std::string& source,
                         int line) {
  Entry e;
  e.section = std::string(spec.section);
  e.key = std::string(spec.key);
  e.kind = spec.kind;
  e.line = line;
  const std::string field = "[" + e.section + "] " + e.key;
  auto tokens = split_ws(value);
  if (tokens.empty()) fail(source, line, field + ": missing value");

  if (spec.kind == ValueKind::text) {
    if (tokens.size() != 1) fail(source, line, field + ": expected a single word");
    e.text = std::string(tokens[0]);
    return e;
  }
  if (spec.kind == ValueKind::boolean) {
    if (tokens.size() != 1 || (tokens[0] != "true" && tokens[0] != "false"))
      fail(source, line, field + ": expected true or false");
    e.numbers = {tokens[0] == "true" ? 1.0 : 0.0};
    return e;
  }

  const bool needs_unit = unit_name(spec.kind) != "none";
  std::string_view unit;
  if (needs_unit) {
    if (tokens.size() < 2 || parse_double(tokens.back()))
      fail(source, line, field + ": missing unit suffix (expected " + std::string(unit_name(spec.kind)) + ")");
    unit = tokens.back();
    tokens.pop_back();
  }
  if (spec.kind != ValueKind::frequency_list && tokens.size() != 1)
    fail(source, line, field + ": expected one value");

  for (auto t : tokens) {
    const auto v = parse_double(t);
    if (!v) fail(source, line, field + ": '" + std::string(t) + "' is not a finite number");
    e.numbers.push_back(*v);
  }

  switch (spec.kind) {
    case ValueKind::frequency:
    case ValueKind::frequency_list: {
      const auto u = units::frequency_unit_from_suffix(unit);
      if (!u)
        fail(source, line, field + ": unknown frequency unit '" + std::string(unit) +
                               "' (expected hz | mhz_2pi | rads)");
      for (auto& v : e.numbers) v = units::to_angular(v, *u);
      break;
    }
    case ValueKind::integer:
      if (e.numbers[0] != std::floor(e.numbers[0]) || e.numbers[0] < 0.0 || e.numbers[0] > 9.0e15)
        fail(source, line, field + ": expected a non-negative integer");
      break;
    case ValueKind::real: break;
    default:
      if (unit != unit_name(spec.kind))
        fail(source, line, field + ": unit '" + std::string(unit) + "' not accepted (expected " +
                               std::string(unit_name(spec.kind)) + ")");
  }
  return e;
}

}  // namespace detail

// Parsed entries in file order, with unknown sections/keys, duplicate keys,
// malformed numbers and missing or wrong units rejected with line numbers.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text, std::string source = "<config>") {
    ConfigFile cfg;
    cfg.source_ = std::move(source);
    cfg.text_ = std::string(text);
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      const auto hash = raw.find_first_of("#;");
      std::string_view line = detail::trim(raw.substr(0, hash));
      if (line.empty()) continue;

      if (line.front() == '[') {
        if (line.back() != ']') detail::fail(cfg.source_, line_no, "unterminated section header");
        section = std::string(detail::trim(line.substr(1, line.size() - 2)));
        if (!detail::known_section(section))
          detail::fail(cfg.source_, line_no, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) detail::fail(cfg.source_, line_no, "expected 'key = value'");
      const std::string key(detail::trim(line.substr(0, eq)));
      if (section.empty()) detail::fail(cfg.source_, line_no, "key '" + key + "' outside any section");
      const KeySpec* spec = detail::find_key(section, key);
      if (!spec) detail::fail(cfg.source_, line_no, "unknown key '" + key + "' in [" + section + "]");
      if (cfg.find(section, key))
        detail::fail(cfg.source_, line_no, "duplicate key '" + key + "' in [" + section + "]");
      cfg.entries_.push_back(detail::parse_value(*spec, detail::trim(line.substr(eq + 1)), cfg.source_, line_no));
    }
    return cfg;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  const Entry* find(std::string_view section, std::string_view key) const noexcept {
    for (const auto& e : entries_)
      if (e.section == section && e.key == key) return &e;
    return nullptr;
  }
  bool has_section(std::string_view section) const noexcept {
    for (const auto& e : entries_)
      if (e.section == section) return true;
    return false;
  }

  std::optional<double> number(std::string_view section, std::string_view key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->numbers.front();
  }
  double require(std::string_view section, std::string_view key) const {
    const auto v = number(section, key);
    if (!v) throw ConfigError(source_ + ": missing required key '" + std::string(key) + "' in [" +
                              std::string(section) + "]");
    return *v;
  }
  [[noreturn]] void fail_at(std::string_view section, std::string_view key, const std::string& msg) const {
    const Entry* e = find(section, key);
    const std::string where = e ? source_ + ":" + std::to_string(e->line) : source_;
    throw ConfigError(where + ": [" + std::string(section) + "] " + std::string(key) + ": " + msg);
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::string& text() const noexcept { return text_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::string text_;
  std::vector<Entry> entries_;
};

struct LinearAxis {
  double start = 0.0;
  double stop = 0.0;
  int points = 0;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      v[static_cast<std::size_t>(i)] =
          points == 1 ? start : start + (stop - start) * static_cast<double>(i) / (points - 1);
    return v;
  }
};

struct NoiseSettings {
  double snr_db = 30.0;
  std::uint64_t seed = 0;
};

struct FitSettings {
  ResidualWeights weights;
  bool detrend = false;
  bool small_sample = false;
  int perturbed_starts = 4;
  double l_eff_guess = 0.01;
  double min_width_steps = 2.0;
};

struct LambdaSettings {
  std::optional<double> omega_13, omega_23;
  double probe_rabi = 0.0;
  double control_rabi = 0.0;
  double probe_detuning = 0.0;
  double control_detuning = 0.0;
  std::optional<double> gamma_31, gamma_32, gamma_21;
  double gamma_phi2 = 0.0;
  double gamma_phi3 = 0.0;
};

struct WorkbenchConfig {
  ConfigFile file;
  std::optional<DeviceParams> device;
  std::optional<PolaritonDrive> drive;
  LambdaSettings lambda;
  std::optional<LinearAxis> probe_axis;  // offsets from omega_13
  std::vector<double> control_values;
  std::optional<LinearAxis> drive_axis;
  std::optional<LinearAxis> fidelity_probe_axis, fidelity_control_axis;
  TransmissionMapping mapping;
  std::optional<NoiseSettings> noise;
  FitSettings fit;
  std::string output_dir = "out";
};

namespace detail {

inline LinearAxis read_axis(const ConfigFile& f, std::string_view section, std::string_view prefix) {
  const std::string s = std::string(prefix) + "start", e = std::string(prefix) + "stop",
                    n = std::string(prefix) + "points";
  LinearAxis a;
  a.start = f.require(section, s);
  a.stop = f.require(section, e);
  const double pts = f.require(section, n);
  if (pts < 2.0) f.fail_at(section, n, "need at least 2 points");
  if (pts > 1e7) f.fail_at(section, n, "too many points");
  a.points = static_cast<int>(pts);
  if (!(a.stop > a.start)) f.fail_at(section, e, "stop must exceed start");
  return a;
}

}  // namespace detail

inline WorkbenchConfig build_config(ConfigFile file) {
  WorkbenchConfig c;
  const auto& f = file;

  if (f.has_section("device")) {
    const auto n0 = f.number("device", "qubit_n0_transition");
    const auto wq = f.number("device", "omega_q");
    if (n0.has_value() == wq.has_value())
      throw ConfigError(f.source() + ": [device] needs exactly one of qubit_n0_transition or omega_q");
    const auto t1 = f.number("device", "t1");
    const auto gq = f.number("device", "gamma_q");
    if (t1.has_value() == gq.has_value())
      throw ConfigError(f.source() + ": [device] needs exactly one of t1 or gamma_q");
    if (t1 && !(*t1 > 0.0)) f.fail_at("device", "t1", "must be positive");
    const double chi = f.require("device", "chi");
    DeviceParams d;
    d.chi = chi;
    d.omega_q = n0 ? *n0 + chi : *wq;
    d.omega_r = f.require("device", "resonator");
    d.gamma_c = f.require("device", "gamma_c");
    d.gamma_q = t1 ? units::rate_from_lifetime(*t1) : *gq;
    d.line_length_l = f.require("device", "line_length");
    d.coupling_g = f.number("device", "coupling_g").value_or(0.0);
    d.anharmonicity_alpha = f.number("device", "anharmonicity").value_or(0.0);
    try {
      d.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(f.source() + ": [device] " + e.what());
    }
    c.device = d;
  }
  if (f.has_section("drive")) {
    PolaritonDrive dr{f.require("drive", "frequency"), f.require("drive", "rabi")};
    if (dr.rabi < 0.0) f.fail_at("drive", "rabi", "must be non-negative");
    c.drive = dr;
  }

  auto& l = c.lambda;
  l.omega_13 = f.number("lambda", "omega_13");
  l.omega_23 = f.number("lambda", "omega_23");
  l.probe_rabi = f.number("lambda", "probe_rabi").value_or(0.0);
  l.control_rabi = f.number("lambda", "control_rabi").value_or(0.0);
  l.probe_detuning = f.number("lambda", "probe_detuning").value_or(0.0);
  l.control_detuning = f.number("lambda", "control_detuning").value_or(0.0);
  l.gamma_31 = f.number("lambda", "gamma_31");
  l.gamma_32 = f.number("lambda", "gamma_32");
  l.gamma_21 = f.number("lambda", "gamma_21");
  l.gamma_phi2 = f.number("lambda", "gamma_phi2").value_or(0.0);
  l.gamma_phi3 = f.number("lambda", "gamma_phi3").value_or(0.0);
  for (const char* k : {"probe_rabi", "control_rabi", "gamma_31", "gamma_32", "gamma_21", "gamma_phi2", "gamma_phi3"})
    if (const auto v = f.number("lambda", k); v && *v < 0.0) f.fail_at("lambda", k, "must be non-negative");

  if (f.has_section("sweep.probe")) c.probe_axis = detail::read_axis(f, "sweep.probe", "");
  if (const Entry* e = f.find("sweep.control", "values")) {
    c.control_values = e->numbers;
    for (double v : c.control_values)
      if (v < 0.0) f.fail_at("sweep.control", "values", "control strengths must be non-negative");
  }
  if (f.has_section("sweep.drive")) {
    c.drive_axis = detail::read_axis(f, "sweep.drive", "");
    if (c.drive_axis->start < 0.0) f.fail_at("sweep.drive", "start", "drive strengths must be non-negative");
  }
  if (f.has_section("sweep.fidelity")) {
    c.fidelity_probe_axis = detail::read_axis(f, "sweep.fidelity", "probe_");
    c.fidelity_control_axis = detail::read_axis(f, "sweep.fidelity", "control_");
    if (c.fidelity_probe_axis->start < 0.0 || c.fidelity_control_axis->start < 0.0)
      throw ConfigError(f.source() + ": [sweep.fidelity] drive strengths must be non-negative");
  }

  c.mapping.scale = f.number("mapping", "scale").value_or(1.0);
  c.mapping.baseline.l_eff =
      f.number("mapping", "l_eff").value_or(c.device ? c.device->line_length_l : BaselineParams{}.l_eff);
  c.mapping.baseline.alpha0 = f.number("mapping", "alpha0").value_or(0.0);
  c.mapping.baseline.phi0 = f.number("mapping", "phi0").value_or(0.0);
  if (!(c.mapping.baseline.l_eff > 0.0)) f.fail_at("mapping", "l_eff", "must be positive");
  if (c.mapping.scale == 0.0) f.fail_at("mapping", "scale", "must be nonzero");

  if (f.has_section("noise")) {
    NoiseSettings n;
    n.snr_db = f.require("noise", "snr_db");
    n.seed = static_cast<std::uint64_t>(f.number("noise", "seed").value_or(0.0));
    c.noise = n;
  }

  c.fit.weights.magnitude = f.number("fit", "weight_magnitude").value_or(1.0);
  c.fit.weights.phase = f.number("fit", "weight_phase").value_or(1.0);
  if (!(c.fit.weights.magnitude >= 0.0) || !(c.fit.weights.phase >= 0.0) ||
      c.fit.weights.magnitude + c.fit.weights.phase == 0.0)
    throw ConfigError(f.source() + ": [fit] weights must be non-negative and not both zero");
  if (const Entry* e = f.find("fit", "point_weighting")) {
    if (e->text == "magnitude")
      c.fit.weights.by_magnitude = true;
    else if (e->text == "none")
      c.fit.weights.by_magnitude = false;
    else
      f.fail_at("fit", "point_weighting", "expected magnitude or none");
  }
  c.fit.detrend = f.number("fit", "detrend").value_or(0.0) != 0.0;
  c.fit.small_sample = f.number("fit", "small_sample").value_or(0.0) != 0.0;
  c.fit.perturbed_starts = static_cast<int>(f.number("fit", "perturbed_starts").value_or(4.0));
  c.fit.l_eff_guess = f.number("fit", "l_eff_guess").value_or(c.mapping.baseline.l_eff);
  if (!(c.fit.l_eff_guess > 0.0)) f.fail_at("fit", "l_eff_guess", "must be positive");
  c.fit.min_width_steps = f.number("fit", "min_width_steps").value_or(2.0);
  if (!(c.fit.min_width_steps >= 0.0)) f.fail_at("fit", "min_width_steps", "must be non-negative");

  if (const Entry* e = f.find("output", "dir")) c.output_dir = e->text;
  c.file = std::move(file);
  return c;
}

inline WorkbenchConfig parse_config(std::string_view text, std::string source = "<config>") {
  return build_config(ConfigFile::parse(text, std::move(source)));
}

inline WorkbenchConfig load_config(const std::string& path) { return build_config(ConfigFile::load(path)); }

inline FitOptions fit_options(const FitSettings& s) {
  FitOptions o;
  o.weights = s.weights;
  o.perturbed_starts = s.perturbed_starts;
  o.l_eff_guess = s.l_eff_guess;
  o.min_width_steps = s.min_width_steps;
  return o;
}

// Where each Lambda decay rate came from.
struct RateSources {
  std::string gamma_31, gamma_32, gamma_21;  // "formula" or "override"
};

struct ResolvedLambda {
  LambdaConfig config;
  std::optional<PolaritonSystem> polaritons;
  RateSources sources;
};

// Builds the Lambda problem at the configured drive point. Level frequencies
// come from the polariton structure when [device] and [drive] are present,
// otherwise from [lambda] omega_13 / omega_23. Explicit rates override the
// formula values.
inline ResolvedLambda resolve_lambda(const WorkbenchConfig& c) {
  ResolvedLambda out;
  const auto& l = c.lambda;
  const std::string& src = c.file.source();
  if (c.device && c.drive) {
    out.polaritons = build_polaritons(*c.device, *c.drive);
    out.config = lambda_from_polaritons(*out.polaritons, l.probe_rabi, l.control_rabi);
  } else {
    if (!l.omega_13 || !l.omega_23)
      throw ConfigError(src + ": Lambda problem needs [device] and [drive], or [lambda] omega_13 and omega_23");
    out.config.omega_13 = *l.omega_13;
    out.config.omega_23 = *l.omega_23;
    out.config.probe_rabi = l.probe_rabi;
    out.config.control_rabi = l.control_rabi;
  }
  if (out.polaritons && (l.omega_13 || l.omega_23))
    throw ConfigError(src + ": [lambda] omega_13 / omega_23 conflict with the polariton structure from [device]");

  auto pick = [&](const std::optional<double>& over, double formula, std::string& tag, const char* name) {
    if (over) {
      tag = "override";
      return *over;
    }
    if (!out.polaritons)
      throw ConfigError(src + ": [lambda] " + name + " required without [device] and [drive]");
    tag = "formula";
    return formula;
  };
  const DecayRates formula = out.polaritons ? out.polaritons->decay_rates : DecayRates{};
  out.config.gamma_31 = pick(l.gamma_31, formula.gamma_31, out.sources.gamma_31, "gamma_31");
  out.config.gamma_32 = pick(l.gamma_32, formula.gamma_32, out.sources.gamma_32, "gamma_32");
  out.config.gamma_21 = pick(l.gamma_21, formula.gamma_21, out.sources.gamma_21, "gamma_21");
  out.config.gamma_phi2 = l.gamma_phi2;
  out.config.gamma_phi3 = l.gamma_phi3;
  out.config.omega_p = out.config.omega_13 + l.probe_detuning;
  out.config.omega_c = out.config.omega_23 + l.control_detuning;
  try {
    out.config.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(src + ": " + e.what());
  }
  return out;
}

}  // namespace eitlab::workbench

#pragma once

// The six workbench commands. Each one writes its files under the output
// directory and returns the run report it wrote.

#include <cstdint>
#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eitlab/aic.hpp"
#include "eitlab/errors.hpp"
#include "eitlab/fit.hpp"
#include "eitlab/group_delay.hpp"
#include "eitlab/lambda_system.hpp"
#include "eitlab/polariton.hpp"
#include "eitlab/spectrum.hpp"
#include "eitlab/units.hpp"
#include "eitlab/workbench/config.hpp"
#include "eitlab/workbench/csv.hpp"
#include "eitlab/workbench/io.hpp"
#include "eitlab/workbench/report.hpp"

namespace eitlab::workbench {

namespace fs = std::filesystem;

struct CommandOptions {
  std::optional<std::string> config;
  std::optional<std::string> input;
  std::string model = "both";  // eit | ats | both
  std::optional<double> length;  // meters
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool detrend = false;
  int delay_points = 1001;
};

struct CommandResult {
  json report;
  fs::path report_path;
  std::vector<fs::path> files;  // everything written besides the report
  bool partial = false;         // some inputs failed; see per-file status
};

namespace detail {

inline std::optional<WorkbenchConfig> load_optional_config(const CommandOptions& o) {
  if (!o.config) return std::nullopt;
  return load_config(*o.config);
}

inline WorkbenchConfig require_config(const CommandOptions& o, const char* command) {
  if (!o.config) throw ConfigError(std::string(command) + ": --config is required");
  return load_config(*o.config);
}

inline fs::path output_dir(const CommandOptions& o, const WorkbenchConfig* cfg) {
  if (o.out) return *o.out;
  return cfg ? fs::path(cfg->output_dir) : fs::path("out");
}

inline std::vector<ModelKind> requested_models(const std::string& flag) {
  if (flag == "eit") return {ModelKind::eit};
  if (flag == "ats") return {ModelKind::ats};
  if (flag == "both") return {ModelKind::eit, ModelKind::ats};
  throw ConfigError("--model must be eit, ats or both, got '" + flag + "'");
}

inline json options_echo(const CommandOptions& o) {
  json j = json::object();
  if (o.input) j["input"] = *o.input;
  j["model"] = o.model;
  if (o.length) j["length_m"] = *o.length;
  if (o.seed) j["seed"] = *o.seed;
  j["detrend"] = o.detrend;
  return j;
}

inline CommandResult finish(json report, const fs::path& dir, const std::string& name,
                            std::vector<fs::path> files, bool partial = false) {
  CommandResult r;
  r.report_path = dir / name;
  write_report(r.report_path, report);
  r.report = std::move(report);
  r.files = std::move(files);
  r.partial = partial;
  return r;
}

inline ComplexSpectrum ingest(const fs::path& path, bool detrend) {
  auto s = read_spectrum_csv(path);
  return detrend ? remove_linear_phase(s) : s;
}

inline std::string sequence_name(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
  return buf;
}

}  // namespace detail

// Polariton levels, decay rates and probe transitions at the configured
// drive point, plus an optional transition-curve table over [sweep.drive].
inline CommandResult cmd_polariton(const CommandOptions& o) {
  const auto cfg = detail::require_config(o, "polariton");
  if (!cfg.device || !cfg.drive) throw ConfigError(cfg.file.source() + ": polariton needs [device] and [drive]");
  const fs::path dir = detail::output_dir(o, &cfg);

  const auto sys = build_polaritons(*cfg.device, *cfg.drive);
  json rep = make_report("polariton", &cfg);
  rep["inputs"]["options"] = detail::options_echo(o);
  rep["results"]["polariton"] = to_json(sys);
  rep["results"]["flags"] = {{"nesting", sys.nesting},
                             {"eit_condition", eit_condition(cfg.lambda.control_rabi, *cfg.device)},
                             {"control_rabi_hz", hz(cfg.lambda.control_rabi)},
                             {"gamma_c_hz", hz(cfg.device->gamma_c)}};
  char line[256];
  std::snprintf(line, sizeof line,
                "decay rates from mixing angles, with the n = 0 qubit line at omega_q - chi = %.9g GHz: "
                "gamma_31/2pi = %.6g MHz, gamma_32/2pi = %.6g MHz, gamma_21/2pi = %.6g kHz",
                hz(cfg.device->n0_transition()) * 1e-9, hz(sys.decay_rates.gamma_31) * 1e-6,
                hz(sys.decay_rates.gamma_32) * 1e-6, hz(sys.decay_rates.gamma_21) * 1e-3);
  rep["log"].push_back(line);
  if (!sys.nesting) rep["log"].push_back("drive frequency lies outside the nesting window");

  std::vector<fs::path> files;
  if (cfg.drive_axis) {
    const auto grid = cfg.drive_axis->values();
    const auto rows = transition_curves(*cfg.device, cfg.drive->omega_d, grid);
    CsvTable t;
    t.header = {"drive_rabi_hz", "omega_13_hz", "omega_23_hz", "omega_14_hz", "omega_24_hz",
                "splitting_0_hz", "splitting_1_hz", "nesting"};
    for (const auto& r : rows)
      t.rows.push_back({format_double(hz(r.rabi)), format_double(hz(r.transitions.omega_13)),
                        format_double(hz(r.transitions.omega_23)), format_double(hz(r.transitions.omega_14)),
                        format_double(hz(r.transitions.omega_24)),
                        format_double(hz(r.transitions.omega_13 - r.transitions.omega_23)),
                        format_double(hz(r.transitions.omega_14 - r.transitions.omega_13)),
                        r.nesting ? "1" : "0"});
    files.push_back(dir / "transitions.csv");
    write_file_atomic(files.back(), t.str());
    rep["results"]["transition_table"] = files.back().filename().string();
  }
  return detail::finish(std::move(rep), dir, "polariton.json", std::move(files));
}

// One probe-sweep CSV per control strength, a manifest listing them, and
// optional seeded noise (file i uses seed + i).
inline CommandResult cmd_simulate(const CommandOptions& o) {
  const auto cfg = detail::require_config(o, "simulate");
  if (!cfg.probe_axis) throw ConfigError(cfg.file.source() + ": simulate needs a [sweep.probe] section");
  if (!(cfg.lambda.probe_rabi > 0.0))
    throw ConfigError(cfg.file.source() + ": simulate needs a positive [lambda] probe_rabi");
  const fs::path dir = detail::output_dir(o, &cfg);
  const auto resolved = resolve_lambda(cfg);

  std::optional<NoiseSettings> noise = cfg.noise;
  json rep = make_report("simulate", &cfg);
  rep["inputs"]["options"] = detail::options_echo(o);
  if (o.seed) {
    if (noise)
      noise->seed = *o.seed;
    else
      rep["log"].push_back("--seed given without a [noise] section; no noise injected");
  }
  rep["results"]["lambda"] = to_json(resolved.config);
  rep["results"]["rate_sources"] = {{"gamma_31", resolved.sources.gamma_31},
                                    {"gamma_32", resolved.sources.gamma_32},
                                    {"gamma_21", resolved.sources.gamma_21}};
  if (resolved.polaritons) rep["results"]["polariton"] = to_json(*resolved.polaritons);
  rep["results"]["noise"] = noise ? json{{"snr_db", noise->snr_db}, {"seed", noise->seed}} : json(nullptr);
  rep["results"]["mapping"] = {{"scale_rad_s", cfg.mapping.scale},
                               {"l_eff_m", cfg.mapping.baseline.l_eff},
                               {"alpha0", cfg.mapping.baseline.alpha0},
                               {"phi0_rad", cfg.mapping.baseline.phi0}};

  std::vector<double> grid = cfg.probe_axis->values();
  for (auto& w : grid) w += resolved.config.omega_13;
  const std::vector<double> controls =
      cfg.control_values.empty() ? std::vector<double>{cfg.lambda.control_rabi} : cfg.control_values;

  // Transmission at omega_13 without the control field; relative suppression
  // is reported against it because absolute levels are setup-specific.
  LambdaConfig undriven = resolved.config;
  undriven.control_rabi = 0.0;
  const double at13 = resolved.config.omega_13;
  const auto s_ref = probe_sweep(undriven, std::span<const double>(&at13, 1), cfg.mapping);

  CsvTable manifest;
  manifest.header = {"control_rabi_hz", "file"};
  json entries = json::array();
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < controls.size(); ++i) {
    LambdaConfig lc = resolved.config;
    lc.control_rabi = controls[i];
    auto spectrum = probe_sweep(lc, grid, cfg.mapping);
    const auto s_here = probe_sweep(lc, std::span<const double>(&at13, 1), cfg.mapping);
    const double suppression_db = 20.0 * std::log10(std::abs(s_ref[0].s21) / std::abs(s_here[0].s21));
    if (noise) spectrum = add_noise(spectrum, noise->snr_db, noise->seed + i);

    const std::string name = detail::sequence_name("spectrum", i, "csv");
    const std::string text = spectrum_csv(spectrum, true);
    files.push_back(dir / name);
    write_file_atomic(files.back(), text);
    manifest.rows.push_back({format_double(hz(controls[i])), name});
    entries.push_back({{"control_rabi_hz", hz(controls[i])},
                       {"file", name},
                       {"hash_fnv1a64", hex64(fnv1a64(text))},
                       {"points", spectrum.size()},
                       {"eit_condition", controls[i] < (resolved.polaritons ? cfg.device->gamma_c
                                                                            : resolved.config.gamma_31 +
                                                                                  resolved.config.gamma_32)},
                       {"suppression_at_omega_13_db", suppression_db},
                       {"noise_seed", noise ? json(noise->seed + i) : json(nullptr)}});
  }
  files.push_back(dir / "manifest.csv");
  write_file_atomic(files.back(), manifest.str());
  rep["results"]["spectra"] = entries;
  rep["results"]["manifest"] = "manifest.csv";
  return detail::finish(std::move(rep), dir, "simulate.json", std::move(files));
}

namespace detail {

inline std::vector<FitResult> fit_models(const ComplexSpectrum& data, const std::vector<ModelKind>& kinds,
                                         const FitOptions& opt) {
  std::vector<FitResult> out;
  const bool both = std::count(kinds.begin(), kinds.end(), ModelKind::eit) == 1 &&
                    std::count(kinds.begin(), kinds.end(), ModelKind::ats) == 1;
  if (both) {
    auto pair = fit_competing(data, opt);
    for (auto k : kinds) out.push_back(pair[k == ModelKind::eit ? 0 : 1]);
    return out;
  }
  for (auto k : kinds) out.push_back(fit_model(data, k, opt));
  return out;
}

inline FitSettings fit_settings(const std::optional<WorkbenchConfig>& cfg) {
  return cfg ? cfg->fit : FitSettings{};
}

}  // namespace detail

// Fits one spectrum file and writes the fit results plus a residual table.
inline CommandResult cmd_fit(const CommandOptions& o) {
  if (!o.input) throw ConfigError("fit: --input is required");
  const auto cfg = detail::load_optional_config(o);
  const auto kinds = detail::requested_models(o.model);
  const fs::path dir = detail::output_dir(o, cfg ? &*cfg : nullptr);
  const FitSettings settings = detail::fit_settings(cfg);
  const bool detrend = o.detrend || settings.detrend;

  const auto data = detail::ingest(*o.input, detrend);
  const auto fits = detail::fit_models(data, kinds, fit_options(settings));

  json rep = make_report("fit", cfg ? &*cfg : nullptr);
  rep["inputs"]["options"] = detail::options_echo(o);
  rep["inputs"]["options"]["detrend"] = detrend;
  rep["inputs"]["data"] = file_echo(*o.input);
  rep["results"]["frequency_range_hz"] = {hz(data.points().front().omega_p), hz(data.points().back().omega_p)};
  rep["results"]["points"] = data.size();
  json fj = json::array();
  for (const auto& f : fits) fj.push_back(to_json(f));
  rep["results"]["fits"] = fj;
  if (fits.size() > 1) rep["results"]["aic"] = to_json(aic_weights(fits, settings.small_sample));

  CsvTable t;
  t.header = {"frequency_hz", "ln_mag", "phase_rad"};
  for (const auto& f : fits) {
    const std::string tag(to_string(f.kind));
    for (const char* col : {"ln_mag_model_", "phase_model_", "ln_mag_residual_", "phase_residual_"})
      t.header.push_back(col + tag);
  }
  for (const auto& p : data.points()) {
    std::vector<std::string> row = {format_double(hz(p.omega_p)), format_double(p.ln_magnitude()),
                                    format_double(p.phase)};
    for (const auto& f : fits) {
      const cplx m = eval_ln_s21(f.model, p.omega_p);
      row.push_back(format_double(m.real()));
      row.push_back(format_double(m.imag()));
      row.push_back(format_double(p.ln_magnitude() - m.real()));
      row.push_back(format_double(p.phase - m.imag()));
    }
    t.rows.push_back(std::move(row));
  }
  std::vector<fs::path> files{dir / "fit_residuals.csv"};
  write_file_atomic(files.back(), t.str());
  rep["results"]["residual_table"] = "fit_residuals.csv";
  return detail::finish(std::move(rep), dir, "fit.json", std::move(files));
}

struct ManifestEntry {
  double control_rabi = 0.0;  // rad/s
  fs::path file;
  int line = 0;
};

// Manifest CSV with header `control_rabi_hz,file`; relative paths resolve
// against the manifest's directory.
inline std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto nl = text.find('\n', pos);
    lines.push_back(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    pos = nl == std::string::npos ? text.size() : nl + 1;
  }
  if (lines.empty()) throw FormatError(path.string() + ": empty manifest");
  const auto header = detail::split_csv_line(lines[0]);
  const auto c_col = detail::column(header, "control_rabi_hz");
  const auto f_col = detail::column(header, "file");
  if (!c_col || !f_col) throw FormatError(path.string() + ": manifest header must contain control_rabi_hz and file");

  std::vector<ManifestEntry> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(li + 1);
    const auto cells = detail::split_csv_line(lines[li]);
    if (cells.size() != header.size()) throw FormatError(where + ": wrong number of fields");
    const auto v = detail::parse_double(cells[*c_col]);
    if (!v || *v < 0.0) throw FormatError(where + ": control_rabi_hz must be a non-negative number");
    if (cells[*f_col].empty()) throw FormatError(where + ": empty file name");
    fs::path f{std::string(cells[*f_col])};
    if (f.is_relative()) f = path.parent_path() / f;
    out.push_back({units::hz_to_rad(*v), f, static_cast<int>(li + 1)});
  }
  if (out.empty()) throw FormatError(path.string() + ": manifest lists no spectra");
  return out;
}

// Both-model fits and AIC weights for every file of a control-strength
// series. A file that fails is reported with its error and skipped.
inline CommandResult cmd_discriminate(const CommandOptions& o) {
  if (!o.input) throw ConfigError("discriminate: --input manifest is required");
  const auto cfg = detail::load_optional_config(o);
  const auto manifest = read_manifest(*o.input);
  const fs::path dir = detail::output_dir(o, cfg ? &*cfg : nullptr);
  const FitSettings settings = detail::fit_settings(cfg);
  const bool detrend = o.detrend || settings.detrend;

  json rep = make_report("discriminate", cfg ? &*cfg : nullptr);
  rep["inputs"]["options"] = detail::options_echo(o);
  rep["inputs"]["options"]["detrend"] = detrend;
  rep["inputs"]["manifest"] = file_echo(*o.input);

  CsvTable t;
  t.header = {"control_rabi_hz", "file", "status", "weight_eit", "weight_ats", "rss_eit", "rss_ats"};
  json entries = json::array();
  bool partial = false;
  for (const auto& m : manifest) {
    json e = {{"control_rabi_hz", hz(m.control_rabi)}, {"file", m.file.string()}};
    try {
      e["data"] = file_echo(m.file);
      const auto data = detail::ingest(m.file, detrend);
      const auto fits = detail::fit_models(data, {ModelKind::eit, ModelKind::ats}, fit_options(settings));
      const auto aic = aic_weights(fits, settings.small_sample);
      e["status"] = "ok";
      e["fits"] = json::array({to_json(fits[0]), to_json(fits[1])});
      e["aic"] = to_json(aic);
      t.rows.push_back({format_double(hz(m.control_rabi)), m.file.filename().string(), "ok",
                        format_double(aic.weight(ModelKind::eit)), format_double(aic.weight(ModelKind::ats)),
                        format_double(fits[0].rss), format_double(fits[1].rss)});
    } catch (const Error& err) {
      partial = true;
      e["status"] = std::string("error: ") + err.what();
      t.rows.push_back({format_double(hz(m.control_rabi)), m.file.filename().string(), "error", "", "", "", ""});
    }
    entries.push_back(std::move(e));
  }
  rep["results"]["series"] = entries;
  std::vector<fs::path> files{dir / "weights.csv"};
  write_file_atomic(files.back(), t.str());
  rep["results"]["weights_table"] = "weights.csv";
  return detail::finish(std::move(rep), dir, "discriminate.json", std::move(files), partial);
}

// Group delay of a converged EIT fit over its fitted window, and the group
// velocity at the window center for line length l.
inline CommandResult cmd_groupdelay(const CommandOptions& o) {
  if (!o.input) throw ConfigError("groupdelay: --input fit report is required");
  const auto cfg = detail::load_optional_config(o);
  double length = 0.0;
  if (o.length)
    length = *o.length;
  else if (cfg && cfg->device)
    length = cfg->device->line_length_l;
  else
    throw ConfigError("groupdelay: --length is required (or a config with [device] line_length)");
  if (!(length > 0.0)) throw ConfigError("groupdelay: length must be positive");
  const fs::path dir = detail::output_dir(o, cfg ? &*cfg : nullptr);

  const json fit_report = read_report(*o.input);
  const json* eit = nullptr;
  json range;
  if (fit_report.contains("results") && fit_report["results"].contains("fits")) {
    for (const auto& f : fit_report["results"]["fits"])
      if (f.value("model", std::string()) == "EIT") eit = &f;
    range = fit_report["results"].value("frequency_range_hz", json());
  }
  if (!eit) throw MissingFit(*o.input + ": report contains no EIT fit");
  const FitResult fit = fit_from_json(*eit);
  if (!fit.converged) throw MissingFit(*o.input + ": EIT fit did not converge (" + fit.stop_reason + ")");
  if (!range.is_array() || range.size() != 2) throw FormatError(*o.input + ": report lacks frequency_range_hz");
  const double lo = units::hz_to_rad(range[0].get<double>()), hi = units::hz_to_rad(range[1].get<double>());
  if (!(hi > lo)) throw FormatError(*o.input + ": empty fitted window");
  if (o.delay_points < 2) throw ConfigError("groupdelay: need at least 2 table points");

  std::vector<double> grid(static_cast<std::size_t>(o.delay_points));
  for (int i = 0; i < o.delay_points; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (o.delay_points - 1);
  const auto table = group_delay_table(fit.model, grid);
  const auto center = suppression_window_center(fit.model);
  const double vg = group_velocity(center.tau_g, length);

  CsvTable t;
  t.header = {"frequency_hz", "tau_g_s"};
  for (const auto& p : table) t.rows.push_back({format_double(hz(p.omega_p)), format_double(p.tau_g)});
  std::vector<fs::path> files{dir / "group_delay.csv"};
  write_file_atomic(files.back(), t.str());

  json rep = make_report("groupdelay", cfg ? &*cfg : nullptr);
  rep["inputs"]["options"] = detail::options_echo(o);
  rep["inputs"]["options"]["length_m"] = length;
  rep["inputs"]["fit_report"] = file_echo(*o.input);
  rep["results"]["window_center"] = {{"frequency_hz", hz(center.omega_p)},
                                     {"tau_g_s", center.tau_g},
                                     {"group_velocity_m_per_s", vg},
                                     {"length_m", length}};
  rep["results"]["delay_table"] = "group_delay.csv";
  return detail::finish(std::move(rep), dir, "groupdelay.json", std::move(files));
}

// Dark-state fidelity at the configured drive point, and over the optional
// [sweep.fidelity] grid.
inline CommandResult cmd_fidelity(const CommandOptions& o) {
  const auto cfg = detail::require_config(o, "fidelity");
  const fs::path dir = detail::output_dir(o, &cfg);
  const auto resolved = resolve_lambda(cfg);
  const auto& lc = resolved.config;

  const auto rho = steady_state(lc);
  const double f = dark_state_fidelity(rho, lc.probe_rabi, lc.control_rabi);
  const double f_expanded = dark_state_fidelity_expanded(rho, lc.probe_rabi, lc.control_rabi);

  json rep = make_report("fidelity", &cfg);
  rep["inputs"]["options"] = detail::options_echo(o);
  rep["results"]["lambda"] = to_json(lc);
  rep["results"]["rate_sources"] = {{"gamma_31", resolved.sources.gamma_31},
                                    {"gamma_32", resolved.sources.gamma_32},
                                    {"gamma_21", resolved.sources.gamma_21}};
  rep["results"]["dark_state_angle_rad"] = dark_state_angle(lc.probe_rabi, lc.control_rabi);
  rep["results"]["density_matrix"] = to_json(rho);
  rep["results"]["fidelity_percent"] = 100.0 * f;
  rep["results"]["fidelity_expanded_percent"] = 100.0 * f_expanded;
  if (lc.gamma_phi2 > 0.0 || lc.gamma_phi3 > 0.0) {
    LambdaConfig decay_only = lc;
    decay_only.gamma_phi2 = decay_only.gamma_phi3 = 0.0;
    const auto rho0 = steady_state(decay_only);
    rep["results"]["fidelity_decay_only_percent"] =
        100.0 * dark_state_fidelity(rho0, lc.probe_rabi, lc.control_rabi);
  }

  std::vector<fs::path> files;
  if (cfg.fidelity_probe_axis) {
    std::vector<std::pair<double, double>> pairs;
    for (double p : cfg.fidelity_probe_axis->values())
      for (double c : cfg.fidelity_control_axis->values()) pairs.emplace_back(p, c);
    const auto rows = fidelity_scan(lc, pairs);
    CsvTable t;
    t.header = {"probe_rabi_hz", "control_rabi_hz", "fidelity_percent"};
    for (const auto& r : rows)
      t.rows.push_back({format_double(hz(r.probe_rabi)), format_double(hz(r.control_rabi)),
                        format_double(100.0 * r.fidelity)});
    files.push_back(dir / "fidelity_scan.csv");
    write_file_atomic(files.back(), t.str());
    rep["results"]["scan_table"] = "fidelity_scan.csv";
  }
  return detail::finish(std::move(rep), dir, "fidelity.json", std::move(files));
}

}  // namespace eitlab::workbench

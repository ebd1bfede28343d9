// eitlab command-line front end.
//
// Exit status: 0 success, 1 input or numerical error, 2 internal error,
// 3 some files of a series failed, 64 usage error.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "eitlab/workbench/commands.hpp"

namespace wb = eitlab::workbench;

namespace {

int run(const char* name, wb::CommandResult (*cmd)(const wb::CommandOptions&), const wb::CommandOptions& o) {
  try {
    const auto r = cmd(o);
    std::printf("%s: wrote %s\n", name, r.report_path.string().c_str());
    for (const auto& f : r.files) std::printf("%s: wrote %s\n", name, f.string().c_str());
    for (const auto& line : r.report["log"]) std::printf("%s: %s\n", name, line.get<std::string>().c_str());
    if (r.partial) {
      std::fprintf(stderr, "%s: some inputs failed, see per-file status in the report\n", name);
      return 3;
    }
    return 0;
  } catch (const eitlab::Error& e) {
    std::fprintf(stderr, "%s: error: %s\n", name, e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: internal error: %s\n", name, e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eitlab: polariton EIT workbench"};
  app.set_version_flag("--version", std::string("eitlab ") + wb::kToolVersion);
  app.require_subcommand(1);

  wb::CommandOptions o;
  std::string config, input, out;
  double length = 0.0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
  };

  auto* polariton = app.add_subcommand("polariton", "polariton levels, decay rates and transitions");
  add_common(polariton);
  auto* simulate = app.add_subcommand("simulate", "steady-state probe spectra per control strength");
  add_common(simulate);
  simulate->add_option("--seed", seed, "noise seed (overrides [noise] seed)");
  auto* fit = app.add_subcommand("fit", "fit a spectrum CSV to the EIT and/or ATS model");
  add_common(fit);
  fit->add_option("--input", input, "spectrum CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", o.model, "eit | ats | both")->check(CLI::IsMember({"eit", "ats", "both"}));
  fit->add_flag("--detrend", o.detrend, "remove a linear phase (electric delay) at ingestion");
  auto* discriminate = app.add_subcommand("discriminate", "AIC weights across a control-strength series");
  add_common(discriminate);
  discriminate->add_option("--input", input, "manifest CSV (control_rabi_hz,file)")->required()->check(CLI::ExistingFile);
  discriminate->add_flag("--detrend", o.detrend, "remove a linear phase (electric delay) at ingestion");
  auto* groupdelay = app.add_subcommand("groupdelay", "group delay and velocity from an EIT fit report");
  add_common(groupdelay);
  groupdelay->add_option("--input", input, "fit report JSON")->required()->check(CLI::ExistingFile);
  groupdelay->add_option("--length", length, "line length l in meters")->check(CLI::PositiveNumber);
  auto* fidelity = app.add_subcommand("fidelity", "dark-state fidelity at the drive point");
  add_common(fidelity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 64;  // --help and --version exit 0
  }

  if (!config.empty()) o.config = config;
  if (!input.empty()) o.input = input;
  if (!out.empty()) o.out = out;
  if (groupdelay->count("--length")) o.length = length;
  if (simulate->count("--seed")) o.seed = seed;

  if (*polariton) return run("polariton", wb::cmd_polariton, o);
  if (*simulate) return run("simulate", wb::cmd_simulate, o);
  if (*fit) return run("fit", wb::cmd_fit, o);
  if (*discriminate) return run("discriminate", wb::cmd_discriminate, o);
  if (*groupdelay) return run("groupdelay", wb::cmd_groupdelay, o);
  return run("fidelity", wb::cmd_fidelity, o);
}

// Command-line front end: channel constants, densities, error-rate sweeps,
// geometry sweeps, SNR penalties and Monte-Carlo checks from a config file.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "uvturb/cli/config.hpp"
#include "uvturb/cli/sweeps.hpp"
#include "uvturb/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

struct Options {
  std::string config;
  std::string out;
  unsigned jobs = 1;
  std::uint64_t seed = 20240601;
  std::string format = "csv";
};

int emit(const uvturb::cli::Table& table, const Options& opt, const uvturb::cli::PlotSpec* plot) {
  std::ofstream file;
  if (!opt.out.empty()) {
    file.open(opt.out, std::ios::binary);
    if (!file) throw uvturb::cli::ConfigError("cannot open output file '" + opt.out + "'");
  }
  std::ostream& os = opt.out.empty() ? std::cout : file;
  if (opt.format == "svg") {
    if (!plot) throw uvturb::cli::ConfigError("this subcommand has no plot; use --format csv");
    uvturb::cli::write_svg(table, *plot, os);
  } else {
    uvturb::cli::write_csv(table, os);
  }
  if (table.failures > 0) {
    std::cerr << "uvturb: " << table.failures << " row(s) failed; see the error column\n";
    return kNumericError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace uvturb::cli;
  CLI::App app{"NLOS ultraviolet turbulence channel: densities, error rates, sweeps"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output path (default: stdout)");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--seed", opt.seed, "Monte-Carlo seed");
    sub->add_option("--format", opt.format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
  };
  auto* channel = app.add_subcommand("channel", "print the derived channel constants");
  auto* pdf = app.add_subcommand("pdf", "tabulate the normalized irradiance density");
  auto* ber = app.add_subcommand("ber-sweep", "error rate against mean SNR");
  auto* geom = app.add_subcommand("geom-sweep", "error rate against receiver elevation");
  auto* penalty = app.add_subcommand("penalty", "SNR penalty between modulation pairs");
  auto* mc = app.add_subcommand("mc", "Monte-Carlo error rates next to the closed forms");
  for (auto* s : {channel, pdf, ber, geom, penalty, mc}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    const RunConfig cfg = load_config(opt.config);
    if (*channel) return emit(run_channel(cfg), opt, nullptr);
    if (*penalty) return emit(run_penalty(cfg), opt, nullptr);
    if (*pdf) {
      const PlotSpec plot{"i_n", "pdf", {"cn2", "method"}, true, true, cfg.name};
      return emit(run_pdf(cfg, opt.jobs), opt, &plot);
    }
    if (*ber) {
      const PlotSpec plot{"snr_db", "error_rate", {"cn2", "scheme", "method"}, false, true, cfg.name};
      return emit(run_ber_sweep(cfg, opt.jobs, opt.seed), opt, &plot);
    }
    if (*geom) {
      const PlotSpec plot{"theta_r_deg", "ber", {"cn2", "scheme", "turbulence"}, false, true, cfg.name};
      return emit(run_geometry_sweep(cfg, opt.jobs), opt, &plot);
    }
    if (*mc) {
      const PlotSpec plot{"snr_db", "mc_error_rate", {"cn2", "scheme"}, false, true, cfg.name};
      return emit(run_mc(cfg, opt.jobs, opt.seed), opt, &plot);
    }
  } catch (const ConfigError& e) {
    std::cerr << "uvturb: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const uvturb::DomainError& e) {
    // Inputs that pass parsing but describe an impossible link.
    std::cerr << "uvturb: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "uvturb: numeric failure: " << e.what() << "\n";
    return kNumericError;
  }
  return 0;
}

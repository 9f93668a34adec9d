// Command-line front end: parameter sweeps over detuning grids, parallel
// realization execution, result persistence and resume.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 interrupted with partial results preserved.

#include <atomic>
#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cdsim/config.hpp"
#include "cdsim/errors.hpp"
#include "cdsim/manifest.hpp"
#include "cdsim/runner.hpp"

namespace {

std::atomic<bool> g_cancel{false};

void handle_signal(int) { g_cancel.store(true); }

struct CommonArgs {
  std::string config_path;
  std::string out_override;
  int workers_override = 0;
  std::uint64_t seed_override = 0;
  bool has_workers = false;
  bool has_seed = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.out_override, "output directory (overrides config)");
  sub->add_option("--workers", args.workers_override, "worker thread count (overrides config)")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { args.has_workers = true; });
  sub->add_option("--seed", args.seed_override, "master seed (overrides config)")
      ->each([&](const std::string&) { args.has_seed = true; });
}

cdsim::RunContext make_context(const CommonArgs& args, cdsim::SimulationConfig config) {
  if (!args.out_override.empty()) config.output_dir = args.out_override;
  if (args.has_workers) config.workers = args.workers_override;
  if (args.has_seed) config.master_seed = args.seed_override;
  cdsim::RunContext ctx;
  ctx.config = std::move(config);
  ctx.out_dir = ctx.config.output_dir;
  ctx.cancel = &g_cancel;
  ctx.log = &std::cerr;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  CLI::App app{"cdsim: coupled-dipole optical response of cold atomic clouds"};
  app.set_version_flag("--version", std::string("cdsim ") + cdsim::kVersion);
  app.require_subcommand(1);

  CommonArgs args;

  CLI::App* dispersion = app.add_subcommand(
      "dispersion", "sweep the detuning grid and extract optical constants");
  add_common(dispersion, args);

  CLI::App* profile =
      app.add_subcommand("profile", "dump the z-binned polarization profile at one detuning");
  add_common(profile, args);
  double profile_detuning = 0.0;
  std::string inject_path;
  profile->add_option("--detuning", profile_detuning, "detuning in linewidth units")
      ->required();
  profile->add_option("--inject", inject_path,
                      "test hook: emit this profile CSV through the dump path")
      ->check(CLI::ExistingFile);

  CLI::App* mie = app.add_subcommand(
      "mie-compare", "microscopic vs Debye-Mie extinction for a spherical cloud");
  add_common(mie, args);
  std::string table_path;
  mie->add_option("--permittivity-table", table_path,
                  "dispersion results CSV providing eps(delta)");

  CLI::App* single = app.add_subcommand("single-atom", "single-atom spectrum self check");
  add_common(single, args);

  CLI::App* dry = app.add_subcommand("dry-run", "validate a config and print a cost estimate");
  add_common(dry, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cdsim::SimulationConfig config = cdsim::parse_config_file(args.config_path);
    const cdsim::RunContext ctx = make_context(args, std::move(config));

    if (dry->parsed()) {
      ctx.config.validate();
      std::cout << "config ok, hash " << cdsim::config_hash_hex(ctx.config) << "\n";
      cdsim::print_cost_estimate(std::cout, ctx.config);
      return 0;
    }
    if (dispersion->parsed()) {
      const auto outcome = cdsim::run_dispersion(ctx);
      std::cerr << "dispersion: " << outcome.manifest.status << ", results in " << ctx.out_dir
                << "\n";
      return outcome.interrupted ? 4 : 0;
    }
    if (profile->parsed()) {
      if (!inject_path.empty()) {
        cdsim::run_profile_inject(ctx, inject_path);
        return 0;
      }
      const auto outcome = cdsim::run_profile_dump(ctx, profile_detuning);
      std::cerr << "profile: " << outcome.manifest.status << ", results in " << ctx.out_dir
                << "\n";
      return outcome.interrupted ? 4 : 0;
    }
    if (mie->parsed()) {
      const auto outcome = cdsim::run_mie_compare(ctx, table_path);
      std::cerr << "mie-compare: " << outcome.manifest.status << ", results in "
                << ctx.out_dir << "\n";
      return outcome.interrupted ? 4 : 0;
    }
    if (single->parsed()) {
      const double max_rel_err = cdsim::run_single_atom(ctx);
      const bool pass = max_rel_err < 1e-10;
      std::cout << (pass ? "PASS" : "FAIL") << " single-atom spectrum, max relative error "
                << max_rel_err << "\n";
      return pass ? 0 : 3;
    }
  } catch (const cdsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cdsim::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const cdsim::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

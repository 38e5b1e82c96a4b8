#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using sqz::cli::Config;

// Each flag value lands in the override layer under its config key.
void add_key(CLI::App* app, Config& flags, const std::string& flag, const std::string& key,
             const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.set(key, v); }, help);
}

void add_bath_keys(CLI::App* app, Config& flags) {
  add_key(app, flags, "--n", "n", "thermal-like occupancy N (or list)");
  add_key(app, flags, "--m", "m", "squeezing correlation M (list: a,b,c or start:stop:count)");
  add_key(app, flags, "--gamma-atomic", "gamma_atomic", "spontaneous emission rate");
  add_key(app, flags, "--omega", "omega", "atom-cavity coupling");
  add_key(app, flags, "--kappa", "kappa", "cavity decay rate");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-atom entanglement in a squeezed reservoir"};
  app.set_version_flag("--version", sqz::cli::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::string> out_path;
  sqz::cli::GlobalOptions global;
  double tol = 0.0;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--out", out_path, "output path (CSV series get a label suffix)");
  app.add_flag("--json", global.json, "emit a single JSON document");
  app.add_flag("--seedless-deterministic", global.deterministic, "fixed-step RK4 integration");
  auto* tol_opt = app.add_option("--tol", tol, "integrator relative tolerance");

  Config flags;

  auto* evolve = app.add_subcommand("evolve", "two-qubit trajectories");
  add_bath_keys(evolve, flags);
  add_key(evolve, flags, "--preset", "preset", "fig1a | fig1b");
  add_key(evolve, flags, "--initial", "initial", "gg | ee | eg | ge");
  add_key(evolve, flags, "--tau-max", "tau_max", "end of the tau grid");
  add_key(evolve, flags, "--tau-steps", "tau_steps", "number of tau intervals");
  evolve->add_flag_callback("--physical-time", [&] { flags.set("physical_time", "true"); },
                            "add a t column (needs --omega and --kappa)");

  auto* boundary = app.add_subcommand("boundary", "stationary entanglement boundary");
  add_key(boundary, flags, "--n-grid", "n_grid", "n values (list or start:stop:count)");
  add_key(boundary, flags, "--gamma-atomic", "gamma_atomic", "spontaneous emission rate");
  add_key(boundary, flags, "--omega", "omega", "atom-cavity coupling");
  add_key(boundary, flags, "--kappa", "kappa", "cavity decay rate");

  auto* criterion = app.add_subcommand("criterion", "initial entanglement generation test");
  add_key(criterion, flags, "--n-grid", "n_grid", "n values");
  add_key(criterion, flags, "--m-steps", "m_steps", "M points per n on [0, sqrt(n(n+1))]");
  add_key(criterion, flags, "--angles", "angles", "comma list of gg, ee, eg");
  add_key(criterion, flags, "--theta", "theta", "theta values (overrides --angles)");
  add_key(criterion, flags, "--phi", "phi", "phi values (overrides --angles)");
  add_key(criterion, flags, "--gamma-atomic", "gamma_atomic", "spontaneous emission rate");
  add_key(criterion, flags, "--omega", "omega", "atom-cavity coupling");
  add_key(criterion, flags, "--kappa", "kappa", "cavity decay rate");

  auto* purity = app.add_subcommand("purity", "linear entropy along trajectories or at steady state");
  add_key(purity, flags, "--preset", "preset", "fig2a | fig2b");
  add_key(purity, flags, "--mode", "mode", "trajectory | steady");
  add_key(purity, flags, "--n", "n", "N value (list in steady mode)");
  add_key(purity, flags, "--m", "m", "M values (trajectory mode)");
  add_key(purity, flags, "--m-steps", "m_steps", "M points (steady mode)");
  add_key(purity, flags, "--initial", "initial", "gg | ee | eg | ge");
  add_key(purity, flags, "--tau-max", "tau_max", "end of the tau grid");
  add_key(purity, flags, "--tau-steps", "tau_steps", "number of tau intervals");

  auto* fullmodel = app.add_subcommand("fullmodel", "atoms plus truncated cavity modes vs reduced model");
  add_bath_keys(fullmodel, flags);
  add_key(fullmodel, flags, "--kappa-over-omega", "kappa_over_omega", "bad-cavity ratio");
  add_key(fullmodel, flags, "--n-max", "n_max", "Fock cutoff per mode");
  add_key(fullmodel, flags, "--initial", "initial", "gg | ee | eg | ge");
  add_key(fullmodel, flags, "--tau-max", "tau_max", "end of the tau grid");
  add_key(fullmodel, flags, "--tau-steps", "tau_steps", "number of tau intervals");

  auto* sweep = app.add_subcommand("sweep", "stationary map over an (N, M) grid");
  add_key(sweep, flags, "--n-grid", "n_grid", "n values");
  add_key(sweep, flags, "--m-steps", "m_steps", "M points per n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sqz::cli::kExitConfig;
  }

  try {
    if (*tol_opt) global.tol = tol;
    Config cfg = config_path ? Config::load_file(*config_path) : Config{};
    cfg.merge(flags);

    sqz::cli::Report report;
    if (*evolve) report = sqz::cli::cmd_evolve(cfg, global);
    else if (*boundary) report = sqz::cli::cmd_boundary(cfg, global);
    else if (*criterion) report = sqz::cli::cmd_criterion(cfg, global);
    else if (*purity) report = sqz::cli::cmd_purity(cfg, global);
    else if (*fullmodel) report = sqz::cli::cmd_fullmodel(cfg, global);
    else report = sqz::cli::cmd_sweep(cfg, global);

    sqz::cli::emit(report, out_path, global.json, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "sqz: " << e.what() << '\n';
    return sqz::cli::exit_code_for(e);
  }
  return sqz::cli::kExitOk;
}

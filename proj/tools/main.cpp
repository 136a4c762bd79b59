#include <cstdint>
#include <iostream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <fdi/errors.hpp>

#include "commands.hpp"

using namespace fdi::cli;

int main(int argc, char** argv) {
  CLI::App app{"Fault isolability analysis, residual selection and residual simulation", "fdi"};
  app.set_version_flag("--version", FDI_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.footer("Bundled data is read from $FDI_DATA_DIR when set.\n"
             "Exit status: 0 success, 1 empty or infeasible result, 2 input error.");

  GlobalOptions global;
  std::uint64_t seed = 0;
  app.add_flag("--json", global.json, "Print a JSON report instead of text");
  app.add_option("--csv", global.csv_dir, "Write result matrices and traces as CSV into DIR")->type_name("DIR");
  auto* seed_opt = app.add_option("--seed", seed, "Measurement noise seed");

  const auto bundled_sets = CLI::IsMember({"engine", "example"});

  FimOptions fim_opts;
  auto* fim = app.add_subcommand("fim", "Isolation matrix and isolated faults of an FSM");
  fim->add_option("file", fim_opts.file, "FSM file, .csv or .json")->check(CLI::ExistingFile);
  fim->add_option("--bundled", fim_opts.bundled, "Bundled FSM")->check(bundled_sets);
  fim->add_option("--rows", fim_opts.rows, "all, original, or the number of leading rows")->capture_default_str();

  EnumerateOptions enum_opts;
  unsigned chain = 0;
  auto* enumerate = app.add_subcommand("enumerate", "Candidate residuals of a structural model");
  enumerate->add_option("file", enum_opts.file, "Model file (.json)")->check(CLI::ExistingFile);
  enumerate->add_option("--bundled", enum_opts.bundled, "Bundled model")->check(CLI::IsMember({"example"}));
  auto* chain_opt =
      enumerate->add_option("--chain", chain, "Synthetic cascade model with N sensors")->check(CLI::Range(1u, 20u));

  SelectOptions select_opts;
  auto* select = app.add_subcommand("select", "Choose additional residuals that improve isolation");
  select->add_option("--bundled", select_opts.bundled, "Bundled original rows and pool")->check(bundled_sets);
  select->add_option("--original", select_opts.original, "FSM of the original residuals")->check(CLI::ExistingFile);
  select->add_option("--pool", select_opts.pool, "FSM of the candidate pool")->check(CLI::ExistingFile);
  select->add_flag("--exact", select_opts.exact, "Search for the smallest subset instead of greedy rounds");

  SimulateOptions sim_opts;
  double step = 0.0;
  auto* simulate = app.add_subcommand("simulate", "Simulate a fault campaign and build the empirical FSM");
  simulate->add_option("file", sim_opts.file, "Scenario file (.json)")->check(CLI::ExistingFile);
  simulate->add_option("--bundled", sim_opts.bundled, "Bundled scenario")->check(CLI::IsMember({"example"}));
  simulate->add_option("--model", sim_opts.model, "Structural model file")->check(CLI::ExistingFile);
  auto* step_opt = simulate->add_option("--step", step, "Integration step in seconds");
  simulate->add_option("--plot-data", sim_opts.plot_data, "Write per-fault residual CSVs into DIR")
      ->type_name("DIR");

  DiagnoseOptions diag_opts;
  auto* diagnose = app.add_subcommand("diagnose", "Fault candidates for a set of triggered residuals");
  diagnose->add_option("file", diag_opts.file, "FSM file, .csv or .json")->check(CLI::ExistingFile);
  diagnose->add_option("--bundled", diag_opts.bundled, "Bundled FSM")->check(bundled_sets);
  diagnose->add_option("--triggered", diag_opts.triggered, "Triggered residual ids")->delimiter(',');
  diagnose->add_flag("--exoneration", diag_opts.exoneration, "Require an exact signature match");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (*seed_opt) global.seed = seed;
  if (*chain_opt) enum_opts.chain = chain;
  if (*step_opt) sim_opts.step = step;

  try {
    if (fim->parsed()) return run_fim(global, fim_opts);
    if (enumerate->parsed()) return run_enumerate(global, enum_opts);
    if (select->parsed()) return run_select(global, select_opts);
    if (simulate->parsed()) return run_simulate(global, sim_opts);
    if (diagnose->parsed()) return run_diagnose(global, diag_opts);
  } catch (const fdi::SimulationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEmpty;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

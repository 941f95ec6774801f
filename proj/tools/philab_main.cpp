#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "philab/common.hpp"
#include "philab/config.hpp"
#include "philab/scenario.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  bool quiet = false;
};

philab::Scenario load_scenario(const CliOptions& cli) {
  philab::ConfigMap map;
  if (!cli.config_path.empty()) map = philab::load_config_file(cli.config_path);
  philab::Scenario sc = philab::Scenario::from_config(map);
  if (cli.seed >= 0) sc.seed = static_cast<std::uint64_t>(cli.seed);
  if (!cli.out_dir.empty()) sc.output_dir = cli.out_dir;
  if (cli.quiet) sc.quiet = true;
  return sc;
}

void add_common(CLI::App* cmd, CliOptions& cli) {
  cmd->add_option("--config", cli.config_path, "scenario config file (key = value)");
  cmd->add_option("--seed", cli.seed, "override the scenario seed");
  cmd->add_option("--out", cli.out_dir, "override the output directory");
  cmd->add_flag("--quiet", cli.quiet, "suppress per-check progress output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"philab: N-function calculus, regularized parabolic solver and "
               "regularity diagnostics"};
  app.require_subcommand(1);
  CliOptions cli;

  CLI::App* verify = app.add_subcommand("verify", "run the inequality suites");
  CLI::App* solve = app.add_subcommand("solve", "time-march a scenario");
  CLI::App* diagnose = app.add_subcommand("diagnose", "evaluate regularity diagnostics");
  CLI::App* sweep = app.add_subcommand("sweep", "diagnose with the epsilon sweep");
  for (CLI::App* cmd : {verify, solve, diagnose, sweep}) add_common(cmd, cli);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    philab::Scenario sc = load_scenario(cli);
    if (verify->parsed()) return philab::run_verify(sc, std::cout);
    if (solve->parsed()) return philab::run_solve(sc, std::cout);
    if (sweep->parsed()) {
      sc.diagnostics = {"sweep"};
      return philab::run_diagnose(sc, std::cout);
    }
    return philab::run_diagnose(sc, std::cout);
  } catch (const philab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const philab::CheckFailure& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 1;
  } catch (const philab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

// exclusion-lab: equilibria, thresholds, simulation and verification runs
// for the radicalization models.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "exclusion_lab/cli.hpp"

namespace cli = exclab::cli;

namespace {

struct Options {
  std::string scenario;
  std::string output;
  double t_end = 5000.0;
  std::string param;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  int trials = 100;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string record;
};

std::optional<std::string> maybe(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium, threshold and stability analysis for two-ideology radicalization models"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "reproduction numbers, regime, equilibria and their stability");
  auto* simulate = app.add_subcommand("simulate", "integrate from the scenario's initial state and write CSV");
  auto* sweep = app.add_subcommand("sweep", "tabulate quantities over a grid of one parameter");
  auto* bifurcate = app.add_subcommand("bifurcate", "scan delta and track the equilibria");
  auto* verify = app.add_subcommand("verify", "seeded random trials against the global stability theorems");

  for (auto* sub : {analyze, simulate, sweep, bifurcate, verify}) {
    sub->add_option("--scenario", o.scenario, "scenario JSON file")->required();
  }
  for (auto* sub : {simulate, sweep, bifurcate, verify}) {
    sub->add_option("--output", o.output, "output file (CSV; JSON report for verify)");
  }
  analyze->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  simulate->add_option("--t-end", o.t_end, "final time")->capture_default_str();
  verify->add_option("--t-end", o.t_end, "horizon of each trial")->capture_default_str();
  sweep->add_option("--param", o.param, "dotted parameter path, e.g. ideology2.beta")->required();
  sweep->add_option("--record", o.record, "comma-separated quantities")->required();
  for (auto* sub : {sweep, bifurcate}) {
    sub->add_option("--from", o.from, "range start")->required();
    sub->add_option("--to", o.to, "range end")->required();
    sub->add_option("--steps", o.steps, "number of grid points (>= 2)")->required();
  }
  verify->add_option("--trials", o.trials, "number of random starts")->capture_default_str();
  verify->add_option("--seed", o.seed, "PRNG seed; overrides the scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitOk : cli::kExitValidation;
  }

  cli::Scenario sc;
  try {
    sc = cli::load_scenario(o.scenario);
  } catch (const cli::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return cli::kExitIo;
  } catch (const exclab::ValidationError& e) {
    std::cerr << "validation error in " << o.scenario << ":\n";
    for (const auto& issue : e.issues()) std::cerr << "  " << issue.field << ": " << issue.message << '\n';
    return cli::kExitValidation;
  }

  const auto output = maybe(o.output);
  if (analyze->parsed()) {
    return cli::run_analyze(sc, o.format == "text" ? cli::Format::Text : cli::Format::Json, std::cout, std::cerr);
  }
  if (simulate->parsed()) return cli::run_simulate(sc, o.t_end, output, std::cout, std::cerr);
  if (sweep->parsed()) {
    cli::SweepSpec spec{o.param, o.from, o.to, o.steps, cli::split_list(o.record)};
    return cli::run_sweep(sc, spec, output, std::cout, std::cerr);
  }
  if (bifurcate->parsed()) return cli::run_bifurcate(sc, o.from, o.to, o.steps, output, std::cout, std::cerr);

  cli::VerifyOptions vo;
  vo.trials = o.trials;
  vo.seed = o.seed;
  vo.t_end = o.t_end;
  vo.output_path = output;
  return cli::run_verify(sc, vo, std::cout, std::cerr);
}

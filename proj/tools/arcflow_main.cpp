#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "arcflow/arcflow.h"

namespace {

constexpr const char* kCommands[] = {
    "integrate",         "integrate-sum",   "estimate-conditions",
    "convergence-study", "dependence-study", "lemma-audit",
    "associativity-study"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arc-field integration and splitting studies"};
  app.set_version_flag("--version", std::string(arcflow_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> n_max;

  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "study config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "sampling seed override");
    sub->add_option("--tol", tol, "tolerance override")
        ->check(CLI::PositiveNumber);
    sub->add_option("--nmax", n_max, "maximum refinement level override")
        ->check(CLI::Range(0, 30));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "arcflow: cannot read config " << config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  int exit_code = 2;
  const arcflow_status status = arcflow_run_study(
      command.c_str(), buffer.str().c_str(), out_dir.c_str(), seed.has_value(),
      seed.value_or(0), tol.has_value(), tol.value_or(0.0), n_max.has_value(),
      n_max.value_or(0), &exit_code);
  if (status != ARCFLOW_OK) {
    std::cerr << "arcflow: " << arcflow_last_error() << "\n";
    return 2;
  }
  if (exit_code != 0) std::cerr << "arcflow: " << arcflow_last_error() << "\n";
  return exit_code;
}

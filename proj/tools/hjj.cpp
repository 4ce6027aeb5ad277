#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hjj/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stationary Hamilton-Jacobi equations on junctions"};
  app.require_subcommand(1);

  std::string problem;
  hjj::RunOptions options;
  double tol = 0.0;

  for (auto const& name : hjj::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--problem", problem, "problem file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", options.seed, "seed for randomized checks")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : hjj::kExitInvalid;
  }
  if (tol > 0.0) {
    options.tol = tol;
  }
  auto const* chosen = app.get_subcommands().front();
  return hjj::run_file(chosen->get_name(), problem, options, std::cout, std::cerr);
}

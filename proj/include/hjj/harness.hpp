#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hjj/problem_io.hpp"

namespace hjj {

enum ExitCode : int { kExitOk = 0, kExitNotConverged = 2, kExitInvalid = 3 };

using Report = nlohmann::ordered_json;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<double> tol;
  std::uint64_t seed = 0;
};

struct RunResult {
  int exit_code = kExitOk;
  Report report;
  std::vector<std::filesystem::path> files;
};

std::vector<std::string> subcommands();

/// Runs one pipeline on a loaded problem and writes report.json, the CSV
/// series and plot scripts into options.out_dir. Throws ProblemError when the
/// problem lacks what the subcommand needs.
RunResult run(std::string const& subcommand, ProblemFile const& problem,
              RunOptions const& options);

/// load_problem + run, mapping every failure to an exit code and a message
/// on `err`.
int run_file(std::string const& subcommand, std::filesystem::path const& problem_path,
             RunOptions const& options, std::ostream& out, std::ostream& err);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(std::filesystem::path const& path, std::string const& content);

/// Gnuplot script for one series of a report ("profile", "sweep",
/// "convergence", "fatten"). Throws std::invalid_argument naming a missing
/// series.
std::string plot_script(Report const& report, std::string const& kind);
std::filesystem::path emit_plot_script(Report const& report, std::string const& kind,
                                       std::filesystem::path const& out_dir);

/// Observed orders log(e_k / e_{k+1}) / log(h_k / h_{k+1}).
std::vector<double> observed_orders(std::vector<double> const& h, std::vector<double> const& err);

/// True when every number in the report is finite.
bool all_finite(Report const& report);

}  // namespace hjj

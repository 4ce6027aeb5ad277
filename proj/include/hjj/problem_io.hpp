#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjj/fatten2d.hpp"
#include "hjj/grid.hpp"
#include "hjj/hamiltonian.hpp"
#include "hjj/junction_solver.hpp"

namespace hjj {

/// Raised for unreadable, malformed or invalid problem files. field() names
/// the offending entry ("edges[1].length"); line()/column() are set for JSON
/// syntax errors.
class ProblemError : public std::runtime_error {
 public:
  ProblemError(std::string field, std::string const& message, int line = 0, int column = 0);

  std::string const& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

struct HamiltonianSpec {
  std::string family;  // abs_shift | quadratic | double_well | expression
  double b = 0.0;
  double c = 0.0;
  std::string expr;
  std::optional<std::vector<double>> minima;

  bool operator==(HamiltonianSpec const&) const = default;
};

struct EdgeEntry {
  double length = 1.0;
  int n_cells = 400;
  FarBC far_bc = Neumann{0.0};
  HamiltonianSpec hamiltonian;
};

struct ViscousSpec {
  std::vector<double> eps_list;

  bool operator==(ViscousSpec const&) const = default;
};

struct FattenSpec {
  std::string expr;  // in p1, p2, x1, x2
  std::vector<double> eps_list;
  double h2_ratio = 8.0;
  double a1 = 1.0;
  double a2 = 1.0;

  bool operator==(FattenSpec const&) const = default;
};

struct ConvergenceSpec {
  std::vector<int> n_cells;
  std::string exact;  // exact solution on edge 0, in x

  bool operator==(ConvergenceSpec const&) const = default;
};

struct ProblemFile {
  int schema_version = 1;
  std::string name;
  std::vector<EdgeEntry> edges;
  JunctionCondition junction;
  std::optional<NodeBC> node_bc;
  std::optional<ViscousSpec> viscous;
  std::optional<FattenSpec> fatten;
  std::optional<ConvergenceSpec> convergence;

  // Built and probed at load.
  std::vector<Hamiltonian> hamiltonians;
  std::optional<Hamiltonian2D> hamiltonian_2d;

  int K() const { return static_cast<int>(edges.size()); }
  std::vector<EdgeSpec> edge_specs() const;
  JunctionProblem junction_problem() const;
};

inline constexpr int kSchemaVersion = 1;

/// Parses, validates and builds every Hamiltonian. Throws ProblemError.
ProblemFile parse_problem(std::string const& text);
ProblemFile load_problem(std::filesystem::path const& path);

/// Canonical JSON text (two-space indent, trailing newline).
std::string write_problem(ProblemFile const& p);

/// Field-by-field equality of the file contents (not the built Hamiltonians).
bool same_problem(ProblemFile const& a, ProblemFile const& b);

Hamiltonian build_hamiltonian(HamiltonianSpec const& spec, double length);

}  // namespace hjj

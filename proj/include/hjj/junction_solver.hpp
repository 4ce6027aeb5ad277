#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjj/edge_solver.hpp"
#include "hjj/grid.hpp"
#include "hjj/hamiltonian.hpp"

namespace hjj {

struct JunctionCondition {
  enum class Kind { StateConstraint, FluxLimited };
  Kind kind = Kind::StateConstraint;
  double A = 0.0;

  static JunctionCondition state_constraint() { return {}; }
  static JunctionCondition flux_limited(double a) { return {Kind::FluxLimited, a}; }
};

/// K edges (-a_i, 0) glued at 0, one Hamiltonian per edge.
struct JunctionProblem {
  std::string name;
  std::vector<EdgeSpec> edges;
  std::vector<Hamiltonian> hamiltonians;
  JunctionCondition condition;

  int K() const { return static_cast<int>(edges.size()); }
  /// Same problem with n_i = round(a_i / h) cells on every edge.
  JunctionProblem with_spacing(double h) const;
  JunctionProblem with_condition(JunctionCondition c) const;
};

/// Validates sizes and edges, rebuilds each Hamiltonian over its edge length
/// and re-probes all of them at one shared coercivity level.
JunctionProblem make_junction_problem(std::string name, std::vector<EdgeSpec> edges,
                                      std::vector<Hamiltonian> hamiltonians,
                                      JunctionCondition condition = {});

struct JunctionSolution {
  JunctionGridFunction u;
  SolveReport report;
  std::vector<double> sc_values;  // u^{sc,i}(0), constructive solver only
  std::vector<int> argmin_edges;  // edges that kept u^{sc,i}
};

/// Monotone node scheme for the state-constraint junction condition.
JunctionSolution solve_junction_direct(JunctionProblem const& problem,
                                       SolveParams const& params = {});

/// u^{sc,i} on every edge, c* = min_i u^{sc,i}(0), Dirichlet(c*) on edges
/// whose u^{sc,i}(0) exceeds c* by more than tie_tol (default 2h).
JunctionSolution solve_junction_constructive(JunctionProblem const& problem,
                                             SolveParams const& params = {},
                                             std::optional<double> tie_tol = std::nullopt);

/// Flux limiter built from the nonincreasing parts of the edge Hamiltonians
/// seen from the junction (p -> H_i(-p, x)), evaluated at outgoing slopes.
FluxLimiter junction_flux_limiter(JunctionProblem const& problem);

/// Node row u0 + max(A, max_i H_i^-(q_i)) with outgoing slopes q_i. Requires
/// convex Hamiltonians without flat parts.
JunctionSolution solve_flux_limited(JunctionProblem const& problem,
                                    SolveParams const& params = {});

struct NodeDiagnostics {
  double node_value = 0.0;
  std::vector<double> slopes;  // order-2 one-sided slopes at 0-
  double sc_residual = 0.0;
  std::optional<double> flux_residual;
  double kirchhoff_sum = 0.0;
  std::vector<double> p_bar;
  std::vector<double> p_under;
};

NodeDiagnostics node_diagnostics(JunctionGridFunction const& u, JunctionProblem const& problem,
                                 int window = 4);

/// max over all grid values of v - u. Throws std::invalid_argument when the
/// grids differ.
double compare_grid_functions(JunctionGridFunction const& v, JunctionGridFunction const& u);

/// Max-norm distance between two junction grid functions on the same grids.
double max_distance(JunctionGridFunction const& a, JunctionGridFunction const& b);

/// First-order scheme residual of `u` under the problem's junction
/// condition: interior, far-end and node rows.
StarVector junction_residual(JunctionGridFunction const& u, JunctionProblem const& problem,
                             SolveParams const& params = {});

struct SlopeBoundReport {
  double distance_to_sc = 0.0;
  double p_bar = 0.0;
  double threshold = 0.0;  // rightward-min threshold of H
  double max_interior_residual = 0.0;
  std::string branch;  // state_constraint | slope_bound | violation

  bool ok() const { return branch != "violation"; }
};

/// Either u is the state-constraint solution (max-norm distance <= 5e-2) or
/// its upper one-sided quotient at 0 is at most the threshold + 5e-2.
SlopeBoundReport subsolution_slope_bound_check(GridFunction1D const& u, Hamiltonian const& h,
                                               SolveParams const& params = {}, int window = 4);

}  // namespace hjj

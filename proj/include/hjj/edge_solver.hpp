#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hjj/grid.hpp"
#include "hjj/hamiltonian.hpp"
#include "hjj/scheme.hpp"

namespace hjj {

/// u0 + min over q in [p_in, max(p_in, P)] of H(q, 0) with p_in = (u0 - u_in)/h.
/// Non-positive values mean the right end passes the viscosity
/// super-solution test for every admissible slope.
double boundary_supersolution_residual(Hamiltonian const& h, double u0, double u_in,
                                       double spacing);

struct EdgeSolution {
  GridFunction1D u;
  SolveReport report;
};

/// Solves u + H(u_x, x) = 0 on one edge. With Dirichlet(c) at the node the
/// node row is max(u0 - c, state-constraint residual), so data above the
/// state-constraint value is not attained; the report then carries the flag
/// "dirichlet_not_attained" and u is the state-constraint solution.
EdgeSolution solve_edge(Hamiltonian const& h, EdgeSpec const& edge, NodeBC const& node_bc,
                        SolveParams const& params = {});

/// order 1: (u_n - u_{n-1})/h; order 2: (3u_n - 4u_{n-1} + u_{n-2})/(2h).
double node_slope(GridFunction1D const& u, int order = 2);

/// Max and min of (u_n - u_{n-k})/(k h) over k = 1 .. window.
std::pair<double, double> one_sided_quotients(GridFunction1D const& u, int window);

struct DirichletRecord {
  double c = 0.0;
  double node_value = 0.0;
  double slope = 0.0;
  double residual = 0.0;    // c + H(slope, 0)
  double derivative = 0.0;  // forward difference of H at the slope
  bool converged = false;
};

struct PropertyReport {
  double sc_value = 0.0;
  std::vector<DirichletRecord> records;
  bool values_monotone = true;
  bool slopes_monotone = true;
  bool residuals_small = true;
  bool decreasing_part = true;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// Solves the Dirichlet problems u_c for every c (each must lie below the
/// state-constraint node value by more than 2 tol) and checks that node
/// values and slopes are nondecreasing in c (slopes within 1e-3), that
/// |c + H(slope, 0)| <= 5e-2 and that H is nonincreasing at the slope (forward
/// difference <= 1e-2).
PropertyReport check_dirichlet_structure(Hamiltonian const& h, EdgeSpec const& edge,
                                         std::span<double const> c_list,
                                         SolveParams const& params = {});

}  // namespace hjj

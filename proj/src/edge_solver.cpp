#include "hjj/edge_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjj {

double boundary_supersolution_residual(Hamiltonian const& h, double u0, double u_in,
                                       double spacing) {
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("grid spacing must be positive");
  }
  SlopeEnvelope const env(h, 0.0, h.coercivity_bound());
  return u0 + env.suffix_min((u0 - u_in) / spacing);
}

EdgeSolution solve_edge(Hamiltonian const& h, EdgeSpec const& edge, NodeBC const& node_bc,
                        SolveParams const& params) {
  if (!(params.tol > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }
  edge.validate();
  NodeCondition node = StateConstraint{};
  if (auto const* d = std::get_if<Dirichlet>(&node_bc)) {
    node = *d;
  }
  StarScheme const scheme({h}, {edge}, node, params.theta);
  JunctionGridFunction u = scheme.initial_guess();
  SolveReport report = solve_star(scheme, u, params);

  EdgeSolution out{std::move(u.per_edge.front()), std::move(report)};
  out.u.role = GridRole::StateConstraint;
  if (auto const* d = std::get_if<Dirichlet>(&node_bc)) {
    if (out.u.node_value() < d->value - std::max(1e-6, 10.0 * params.tol)) {
      out.report.flags.push_back("dirichlet_not_attained");
    } else {
      out.u.role = GridRole::Dirichlet;
    }
  }
  return out;
}

double node_slope(GridFunction1D const& u, int order) {
  auto const& v = u.values;
  std::size_t const n = v.size() - 1;
  if (order == 1) {
    return (v[n] - v[n - 1]) / u.h();
  }
  if (order != 2 || n < 2) {
    throw std::invalid_argument("node_slope supports order 1, or order 2 with at least 2 cells");
  }
  return (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * u.h());
}

std::pair<double, double> one_sided_quotients(GridFunction1D const& u, int window) {
  int const n = u.n();
  if (window < 1 || window > n / 2) {
    throw std::invalid_argument("window must lie in [1, n_cells/2]");
  }
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= window; ++k) {
    double const q = (u.values[n] - u.values[n - k]) / (k * u.h());
    hi = std::max(hi, q);
    lo = std::min(lo, q);
  }
  return {hi, lo};
}

PropertyReport check_dirichlet_structure(Hamiltonian const& h, EdgeSpec const& edge,
                                         std::span<double const> c_list,
                                         SolveParams const& params) {
  PropertyReport report;
  auto const sc = solve_edge(h, edge, StateConstraint{}, params);
  report.sc_value = sc.u.node_value();
  for (double c : c_list) {
    if (c >= report.sc_value - 2.0 * params.tol) {
      throw std::invalid_argument("Dirichlet value " + std::to_string(c) +
                                  " is not below the state-constraint value " +
                                  std::to_string(report.sc_value));
    }
  }

  std::vector<double> cs(c_list.begin(), c_list.end());
  std::sort(cs.begin(), cs.end());
  constexpr double kDerivStep = 1e-6;
  for (double c : cs) {
    auto const sol = solve_edge(h, edge, Dirichlet{c}, params);
    DirichletRecord rec;
    rec.c = c;
    rec.node_value = sol.u.node_value();
    rec.slope = node_slope(sol.u, 2);
    rec.residual = c + h(rec.slope, 0.0);
    rec.derivative = (h(rec.slope + kDerivStep, 0.0) - h(rec.slope, 0.0)) / kDerivStep;
    rec.converged = sol.report.converged;
    report.records.push_back(rec);
  }

  auto fail = [&](std::string msg) { report.failures.push_back(std::move(msg)); };
  for (std::size_t k = 0; k < report.records.size(); ++k) {
    auto const& r = report.records[k];
    if (!r.converged) {
      fail("solve did not converge at c = " + std::to_string(r.c));
    }
    if (std::abs(r.residual) > 5e-2) {
      report.residuals_small = false;
      fail("|c + H(slope)| = " + std::to_string(std::abs(r.residual)) + " at c = " +
           std::to_string(r.c));
    }
    if (r.derivative > 1e-2) {
      report.decreasing_part = false;
      fail("slope " + std::to_string(r.slope) + " not on the decreasing part at c = " +
           std::to_string(r.c));
    }
    if (k > 0) {
      auto const& prev = report.records[k - 1];
      if (r.node_value < prev.node_value - params.tol) {
        report.values_monotone = false;
        fail("node value decreases between c = " + std::to_string(prev.c) + " and " +
             std::to_string(r.c));
      }
      if (r.slope < prev.slope - 1e-3) {
        report.slopes_monotone = false;
        fail("node slope decreases between c = " + std::to_string(prev.c) + " and " +
             std::to_string(r.c));
      }
    }
  }
  return report;
}

}  // namespace hjj

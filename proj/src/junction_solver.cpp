#include "hjj/junction_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hjj/parallel.hpp"
#include "hjj/scheme.hpp"

namespace hjj {
namespace {

void require_state_constraint(JunctionProblem const& problem) {
  if (problem.condition.kind != JunctionCondition::Kind::StateConstraint) {
    throw std::invalid_argument("problem '" + problem.name +
                                "' does not carry the state-constraint junction condition");
  }
}

NodeCondition node_condition(JunctionProblem const& problem) {
  if (problem.condition.kind == JunctionCondition::Kind::FluxLimited) {
    return junction_flux_limiter(problem);
  }
  return StateConstraint{};
}

void same_grids(JunctionGridFunction const& a, JunctionGridFunction const& b) {
  if (a.K() != b.K()) {
    throw std::invalid_argument("grid functions have different edge counts");
  }
  for (int i = 0; i < a.K(); ++i) {
    auto const& ea = a.per_edge[i];
    auto const& eb = b.per_edge[i];
    if (ea.values.size() != eb.values.size() || ea.edge.length != eb.edge.length) {
      throw std::invalid_argument("grid functions differ on edge " + std::to_string(i));
    }
  }
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

JunctionProblem JunctionProblem::with_spacing(double h) const {
  if (!(h > 0.0)) {
    throw std::invalid_argument("grid spacing must be positive");
  }
  JunctionProblem out = *this;
  for (auto& e : out.edges) {
    e.n_cells = static_cast<int>(std::lround(e.length / h));
    e.validate();
  }
  return out;
}

JunctionProblem JunctionProblem::with_condition(JunctionCondition c) const {
  JunctionProblem out = *this;
  out.condition = c;
  return out;
}

JunctionProblem make_junction_problem(std::string name, std::vector<EdgeSpec> edges,
                                      std::vector<Hamiltonian> hamiltonians,
                                      JunctionCondition condition) {
  if (edges.empty()) {
    throw std::invalid_argument("a junction needs at least one edge");
  }
  if (edges.size() != hamiltonians.size()) {
    throw std::invalid_argument("expected " + std::to_string(edges.size()) +
                                " Hamiltonians, got " + std::to_string(hamiltonians.size()));
  }
  double level = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i].validate();
    if (hamiltonians[i].domain_length() != edges[i].length) {
      hamiltonians[i] = hamiltonians[i].with_domain(edges[i].length);
    }
    level = std::max(level, hamiltonians[i].coercivity_level());
  }
  for (auto& h : hamiltonians) {
    h = h.with_level(level);
  }
  return JunctionProblem{std::move(name), std::move(edges), std::move(hamiltonians), condition};
}

JunctionSolution solve_junction_direct(JunctionProblem const& problem, SolveParams const& params) {
  require_state_constraint(problem);
  StarScheme const scheme(problem.hamiltonians, problem.edges, StateConstraint{}, params.theta);
  JunctionSolution out;
  out.u = scheme.initial_guess();
  out.report = solve_star(scheme, out.u, params);
  for (auto& g : out.u.per_edge) {
    g.role = GridRole::Generic;
  }
  return out;
}

JunctionSolution solve_junction_constructive(JunctionProblem const& problem,
                                             SolveParams const& params,
                                             std::optional<double> tie_tol) {
  require_state_constraint(problem);
  auto const start = std::chrono::steady_clock::now();
  int const k = problem.K();

  std::vector<EdgeSolution> sc(k);
  parallel_for(k, [&](std::size_t i) {
    sc[i] = solve_edge(problem.hamiltonians[i], problem.edges[i], StateConstraint{}, params);
  });

  JunctionSolution out;
  out.report.method = "constructive";
  out.report.converged = true;
  double c_star = std::numeric_limits<double>::infinity();
  for (auto const& s : sc) {
    out.sc_values.push_back(s.u.node_value());
    c_star = std::min(c_star, s.u.node_value());
  }

  std::vector<char> tied(k);
  for (int i = 0; i < k; ++i) {
    double const tol = tie_tol.value_or(2.0 * problem.edges[i].h());
    tied[i] = out.sc_values[i] - c_star <= tol;
    if (tied[i]) {
      out.argmin_edges.push_back(i);
    }
  }

  std::vector<EdgeSolution> pieces(k);
  parallel_for(k, [&](std::size_t i) {
    if (!tied[i]) {
      pieces[i] = solve_edge(problem.hamiltonians[i], problem.edges[i], Dirichlet{c_star}, params);
    }
  });

  for (int i = 0; i < k; ++i) {
    out.report.absorb(sc[i].report);
    if (tied[i]) {
      out.u.per_edge.push_back(std::move(sc[i].u));
    } else {
      out.report.absorb(pieces[i].report);
      out.u.per_edge.push_back(std::move(pieces[i].u));
    }
  }
  out.u.node_value = c_star;
  out.u.sync_node();
  out.report.method = "constructive";
  out.report.wall_time = elapsed(start);
  return out;
}

FluxLimiter junction_flux_limiter(JunctionProblem const& problem) {
  std::vector<Hamiltonian> reflected;
  for (auto const& h : problem.hamiltonians) {
    if (!h.shape().convex || !h.shape().no_flat_parts) {
      throw HamiltonianError("flux limiter requires convex H without flat parts (" +
                             h.describe() + ")");
    }
    reflected.push_back(reflect(h));
  }
  return make_flux_limiter(reflected, problem.condition.A);
}

JunctionSolution solve_flux_limited(JunctionProblem const& problem, SolveParams const& params) {
  if (problem.condition.kind != JunctionCondition::Kind::FluxLimited) {
    throw std::invalid_argument("problem '" + problem.name + "' is not flux limited");
  }
  StarScheme const scheme(problem.hamiltonians, problem.edges, junction_flux_limiter(problem),
                          params.theta);
  JunctionSolution out;
  out.u = scheme.initial_guess();
  out.report = solve_star(scheme, out.u, params);
  return out;
}

NodeDiagnostics node_diagnostics(JunctionGridFunction const& u, JunctionProblem const& problem,
                                 int window) {
  if (u.K() != problem.K()) {
    throw std::invalid_argument("grid function does not match the problem's edge count");
  }
  NodeDiagnostics d;
  d.node_value = u.node_value;
  double sc = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < problem.K(); ++i) {
    auto const& g = u.per_edge[i];
    double const s = node_slope(g, 2);
    d.slopes.push_back(s);
    d.kirchhoff_sum += s;
    auto const& h = problem.hamiltonians[i];
    SlopeEnvelope const env(h, 0.0, h.coercivity_bound());
    sc = std::max(sc, env.suffix_min(s));
    auto const [hi, lo] = one_sided_quotients(g, std::min(window, g.n() / 2));
    d.p_bar.push_back(hi);
    d.p_under.push_back(lo);
  }
  d.sc_residual = u.node_value + sc;
  if (problem.condition.kind == JunctionCondition::Kind::FluxLimited) {
    auto const limiter = junction_flux_limiter(problem);
    std::vector<double> outgoing;
    for (double s : d.slopes) {
      outgoing.push_back(-s);
    }
    d.flux_residual = u.node_value + limiter(outgoing);
  }
  return d;
}

double compare_grid_functions(JunctionGridFunction const& v, JunctionGridFunction const& u) {
  same_grids(v, u);
  double excess = v.node_value - u.node_value;
  for (int i = 0; i < v.K(); ++i) {
    auto const& a = v.per_edge[i].values;
    auto const& b = u.per_edge[i].values;
    for (std::size_t j = 0; j < a.size(); ++j) {
      excess = std::max(excess, a[j] - b[j]);
    }
  }
  return excess;
}

double max_distance(JunctionGridFunction const& a, JunctionGridFunction const& b) {
  same_grids(a, b);
  double d = std::abs(a.node_value - b.node_value);
  for (int i = 0; i < a.K(); ++i) {
    auto const& x = a.per_edge[i].values;
    auto const& y = b.per_edge[i].values;
    for (std::size_t j = 0; j < x.size(); ++j) {
      d = std::max(d, std::abs(x[j] - y[j]));
    }
  }
  return d;
}

StarVector junction_residual(JunctionGridFunction const& u, JunctionProblem const& problem,
                             SolveParams const& params) {
  StarScheme const scheme(problem.hamiltonians, problem.edges, node_condition(problem),
                          params.theta);
  return evaluate_residual(scheme, u);
}

SlopeBoundReport subsolution_slope_bound_check(GridFunction1D const& u, Hamiltonian const& h,
                                               SolveParams const& params, int window) {
  SlopeBoundReport report;
  auto const sc = solve_edge(h, u.edge, StateConstraint{}, params);
  for (std::size_t j = 0; j < u.values.size(); ++j) {
    report.distance_to_sc = std::max(report.distance_to_sc, std::abs(u.values[j] - sc.u.values[j]));
  }
  report.p_bar = one_sided_quotients(u, std::min(window, u.n() / 2)).first;
  report.threshold = rightward_min_threshold(h);

  StarScheme const scheme({h}, {u.edge}, StateConstraint{}, params.theta);
  for (int j = 1; j < u.n(); ++j) {
    report.max_interior_residual =
        std::max(report.max_interior_residual,
                 scheme.row(0, j, u.values[j - 1], u.values[j], u.values[j + 1]));
  }

  if (report.distance_to_sc <= 5e-2) {
    report.branch = "state_constraint";
  } else if (report.p_bar <= report.threshold + 5e-2) {
    report.branch = "slope_bound";
  } else {
    report.branch = "violation";
  }
  return report;
}

}  // namespace hjj

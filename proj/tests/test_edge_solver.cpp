#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hjj/edge_solver.hpp"
#include "hjj/scheme.hpp"

using namespace hjj;
using doctest::Approx;

namespace {

Hamiltonian builtin(char const* family, double b, double c) {
  double const p[2] = {b, c};
  return make_builtin(family, p);
}

double max_error(GridFunction1D const& u, double (*exact)(double)) {
  double e = 0.0;
  for (int j = 0; j <= u.n(); ++j) {
    e = std::max(e, std::abs(u.values[j] - exact(u.edge.x(j))));
  }
  return e;
}

GridFunction1D sampled(EdgeSpec const& edge, double (*f)(double)) {
  auto g = GridFunction1D::constant(edge, 0.0);
  for (int j = 0; j <= edge.n_cells; ++j) {
    g.values[j] = f(edge.x(j));
  }
  return g;
}

}  // namespace

TEST_CASE("lax_friedrichs_flux") {
  auto const a = builtin("abs_shift", 0, 1);
  CHECK(lax_friedrichs_flux(a, 1.0, 1.0, 1.0, 0.0) == 0.0);
  CHECK(lax_friedrichs_flux(a, 0.0, 2.0, 1.0, 0.0) == -1.0);
  CHECK(lax_friedrichs_flux(builtin("quadratic", 1, 1), 2.0, 0.0, 4.0, 0.0) == 3.0);
  for (double p = -2.0; p <= 2.0; p += 0.25) {
    CHECK(lax_friedrichs_flux(a, p, p + 0.1, 1.0, 0.0) <= lax_friedrichs_flux(a, p, p, 1.0, 0.0) + 1e-12);
    CHECK(lax_friedrichs_flux(a, p + 0.1, p, 1.0, 0.0) >= lax_friedrichs_flux(a, p, p, 1.0, 0.0) - 1e-12);
  }
}

TEST_CASE("boundary_supersolution_residual") {
  auto const a = builtin("abs_shift", 0, 1);
  CHECK(boundary_supersolution_residual(a, 1.0, 1.0, 0.1) == Approx(0.0));
  CHECK(boundary_supersolution_residual(a, 0.0, 0.1, 0.1) == Approx(-1.0));
  CHECK(boundary_supersolution_residual(builtin("quadratic", 1, 1), 0.0, 0.2, 0.1) ==
        Approx(-1.0));
}

TEST_CASE("solve_edge analytic oracles") {
  auto const a = builtin("abs_shift", 0, 1);
  EdgeSpec const edge{1.0, 400, Neumann{0.0}};
  auto const sc = solve_edge(a, edge, StateConstraint{});
  CHECK(sc.report.converged);
  CHECK(sc.report.final_residual <= 1e-8);
  CHECK(max_error(sc.u, [](double) { return 1.0; }) <= 1e-2);
  CHECK(sc.u.role == GridRole::StateConstraint);

  auto const d = solve_edge(a, edge, Dirichlet{0.0});
  CHECK(d.report.converged);
  CHECK(max_error(d.u, [](double x) { return 1.0 - std::exp(x); }) <= 1e-2);
  CHECK(d.u.node_value() == Approx(0.0));
  CHECK(d.u.lipschitz() <= 2.0 * a.coercivity_bound());

  auto const two = solve_edge(builtin("abs_shift", 0, 2), edge, StateConstraint{});
  CHECK(max_error(two.u, [](double) { return 2.0; }) <= 1e-2);

  auto const above = solve_edge(a, edge, Dirichlet{1.5});
  CHECK(above.report.has_flag("dirichlet_not_attained"));
  CHECK(max_error(above.u, [](double) { return 1.0; }) <= 1e-2);

  SolveParams explicit_only;
  explicit_only.method = SolveMethod::Explicit;
  auto const ex = solve_edge(a, EdgeSpec{1.0, 100, Neumann{0.0}}, Dirichlet{0.0}, explicit_only);
  CHECK(ex.report.converged);
  CHECK(max_error(ex.u, [](double x) { return 1.0 - std::exp(x); }) <= 2e-2);
}

TEST_CASE("solve_edge reports non-convergence") {
  SolveParams p;
  p.method = SolveMethod::Explicit;
  p.max_iters = 3;
  auto const r = solve_edge(builtin("abs_shift", 0, 1), EdgeSpec{1.0, 400}, Dirichlet{0.0}, p);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.final_residual > p.tol);
}

TEST_CASE("far boundary conditions") {
  auto const a = builtin("abs_shift", 0, 1);
  auto const sc = solve_edge(a, EdgeSpec{1.0, 200, StateConstraint{}}, StateConstraint{});
  CHECK(max_error(sc.u, [](double) { return 1.0; }) <= 1e-2);
  auto const d = solve_edge(a, EdgeSpec{1.0, 200, Dirichlet{0.5}}, StateConstraint{});
  CHECK(d.report.converged);
  CHECK(d.u.values.front() == 0.5);
  CHECK(d.u.node_value() == Approx(1.0 - 0.5 * std::exp(-1.0)).epsilon(1e-2));
  CHECK_THROWS_AS(EdgeSpec(1.0, 4).validate(), std::invalid_argument);
  CHECK_THROWS_AS(EdgeSpec(-1.0, 40).validate(), std::invalid_argument);
}

TEST_CASE("node_slope") {
  EdgeSpec const edge{1.0, 400};
  auto const u = sampled(edge, [](double x) { return 1.0 - std::exp(x); });
  CHECK(node_slope(u, 2) == Approx(-1.0).epsilon(3e-3));
  CHECK(node_slope(GridFunction1D::constant(edge, 3.0), 2) == 0.0);
  CHECK(node_slope(GridFunction1D::constant(edge, 3.0), 1) == 0.0);
  auto const lin = sampled(EdgeSpec{1.0, 64}, [](double x) { return 2.0 - 0.75 * x; });
  CHECK(node_slope(lin, 2) == Approx(-0.75).epsilon(1e-12));
  CHECK(node_slope(lin, 1) == Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("one_sided_quotients") {
  EdgeSpec const edge{1.0, 400};
  auto const [hi, lo] = one_sided_quotients(sampled(edge, [](double x) { return 1.0 - std::exp(x); }), 4);
  CHECK(std::abs(hi + 1.0) <= 4 * edge.h());
  CHECK(std::abs(lo + 1.0) <= 4 * edge.h());
  auto const [a, b] = one_sided_quotients(sampled(edge, [](double x) { return std::abs(x); }), 4);
  CHECK(a == Approx(-1.0));
  CHECK(b == Approx(-1.0));
  auto const [c, d] = one_sided_quotients(GridFunction1D::constant(edge, 2.0), 4);
  CHECK(c == 0.0);
  CHECK(d == 0.0);
}

TEST_CASE("Dirichlet structure") {
  EdgeSpec const edge{1.0, 400};
  std::vector<double> const cs{-1.0, -0.5, 0.0, 0.5};
  auto const r = check_dirichlet_structure(builtin("abs_shift", 0, 1), edge, cs);
  CHECK(r.passed());
  CHECK(r.sc_value == Approx(1.0).epsilon(1e-6));
  REQUIRE(r.records.size() == 4);
  for (auto const& rec : r.records) {
    CHECK(std::abs(rec.slope - (rec.c - 1.0)) <= 5e-3);
    CHECK(std::abs(rec.residual) <= 5e-2);
  }
  CHECK(std::abs(r.records[2].residual) <= 5e-3);

  std::vector<double> const one{-1.0};
  auto const q = check_dirichlet_structure(builtin("quadratic", 1, 1), edge, one);
  CHECK(q.passed());
  CHECK(std::abs(q.records[0].slope - (1.0 - std::sqrt(2.0))) <= 1e-2);

  std::vector<double> const bad{0.0, 2.0};
  CHECK_THROWS_AS(check_dirichlet_structure(builtin("abs_shift", 0, 1), edge, bad),
                  std::invalid_argument);
}

TEST_CASE("consistency of the analytic solution") {
  auto const a = builtin("abs_shift", 0, 1);
  std::vector<double> ratios;
  for (int n : {100, 200, 400}) {
    EdgeSpec const edge{1.0, n, Dirichlet{1.0 - std::exp(-1.0)}};
    StarScheme const s({a}, {edge}, Dirichlet{0.0});
    JunctionGridFunction u;
    u.per_edge.push_back(sampled(edge, [](double x) { return 1.0 - std::exp(x); }));
    u.node_value = 0.0;
    u.sync_node();
    ratios.push_back(evaluate_residual(s, u).max_abs() / edge.h());
  }
  CHECK(ratios[2] <= 1.2 * ratios[1]);
  CHECK(ratios[1] <= 1.2 * ratios[0]);
  CHECK(ratios[2] < 10.0);
}

TEST_CASE("comparison after one pseudo-time step") {
  auto const h = builtin("quadratic", 1, 1);
  EdgeSpec const edge{1.0, 64};
  StarScheme const s({h}, {edge}, StateConstraint{});
  double const dt = s.explicit_dt(0.9);
  JunctionGridFunction u;
  u.per_edge.push_back(sampled(edge, [](double x) { return 0.5 * std::sin(3 * x); }));
  u.node_value = u.per_edge[0].values.back();
  auto v = u;
  for (int j = 0; j <= edge.n_cells; ++j) {
    v.per_edge[0].values[j] -= 0.01 * (1.0 + std::cos(7 * j));
  }
  v.node_value = v.per_edge[0].values.back();
  s.explicit_step(u, dt);
  s.explicit_step(v, dt);
  for (int j = 0; j <= edge.n_cells; ++j) {
    CHECK(v.per_edge[0].values[j] <= u.per_edge[0].values[j] + 1e-12);
  }
}

TEST_CASE("convergence order on the Dirichlet oracle") {
  auto const a = builtin("abs_shift", 0, 1);
  std::vector<double> err;
  for (int n : {100, 200, 400}) {
    auto const r = solve_edge(a, EdgeSpec{1.0, n}, Dirichlet{0.0});
    err.push_back(max_error(r.u, [](double x) { return 1.0 - std::exp(x); }));
  }
  CHECK(std::log2(err[0] / err[1]) >= 0.9);
  CHECK(std::log2(err[1] / err[2]) >= 0.9);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hjj/edge_solver.hpp"
#include "hjj/fixtures.hpp"
#include "hjj/junction_solver.hpp"
#include "hjj/viscous.hpp"

using namespace hjj;
using doctest::Approx;

namespace {

Hamiltonian builtin(char const* family, double b, double c) {
  double const p[2] = {b, c};
  return make_builtin(family, p);
}

JunctionProblem star(std::vector<Hamiltonian> hs, int n = 400, FarBC far = Neumann{0.0}) {
  std::vector<EdgeSpec> edges(hs.size(), EdgeSpec{1.0, n, far});
  return make_junction_problem("test", edges, std::move(hs));
}

}  // namespace

TEST_CASE("continuation schedule") {
  CHECK(continuation_schedule(1.0, 0.1) == std::vector<double>{1.0, 0.5, 0.25, 0.125, 0.1});
  CHECK(continuation_schedule(1.0, 0.25) == std::vector<double>{1.0, 0.5, 0.25});
  CHECK(continuation_schedule(1.0, 5.0) == std::vector<double>{5.0});
}

TEST_CASE("Kirchhoff solve on the symmetric abs star") {
  auto const abs1 = builtin("abs_shift", 0, 1);
  auto const p = star({abs1, abs1}, 400, Dirichlet{0.0});
  ViscousParams params;
  params.epsilon = 0.1;
  auto const s = solve_viscous_kirchhoff(p, params);
  REQUIRE(s.report.converged);
  CHECK(s.interior_residual <= 1e-8);
  CHECK(s.node_residual <= 1e-8);
  CHECK(s.u.node_value < 1.0);
  auto const d = node_diagnostics(s.u, p);
  CHECK(std::abs(d.kirchhoff_sum) <= 1e-2);
  for (int j = 0; j <= 400; ++j) {
    CHECK(s.u.per_edge[0].values[j] == Approx(s.u.per_edge[1].values[j]).epsilon(1e-9));
  }
  CHECK(s.u.lipschitz() <= 2.0 * abs1.coercivity_bound() + 1.0);
  CHECK(s.schedule.back() == 0.1);
}

TEST_CASE("Neumann star has the constant solution") {
  auto const abs1 = builtin("abs_shift", 0, 1);
  ViscousParams params;
  params.epsilon = 0.05;
  auto const s = solve_viscous_kirchhoff(star({abs1}, 400), params);
  REQUIRE(s.report.converged);
  for (double v : s.u.per_edge[0].values) {
    CHECK(v == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("large viscosity flattens the solution") {
  auto const abs1 = builtin("abs_shift", 0, 1);
  ViscousParams params;
  params.epsilon = 1e3;
  auto const s = solve_viscous_kirchhoff(star({abs1, abs1}, 200, Dirichlet{1.0}), params);
  REQUIRE(s.report.converged);
  for (auto const& e : s.u.per_edge) {
    for (double v : e.values) {
      CHECK(v == Approx(1.0).epsilon(1e-2));
    }
  }
}

TEST_CASE("predict_selection") {
  CHECK(predict_selection(star({builtin("abs_shift", 0, 1), builtin("abs_shift", 0, 2)}, 50)) ==
        Selection::SelectsStateConstraint);
  CHECK(predict_selection(star({builtin("quadratic", 1, 1), builtin("quadratic", 1, 1)}, 50)) ==
        Selection::NoGuarantee);
  CHECK(predict_selection(star({builtin("double_well", -2, 0), builtin("double_well", -2, 0)},
                               50)) == Selection::SelectsStateConstraint);
}

TEST_CASE("classify_limit rules") {
  VanishingViscosityReport r;
  for (double e : {0.2, 0.1, 0.05}) {
    SweepRecord rec;
    rec.epsilon = e;
    r.records.push_back(rec);
  }
  r.extrapolated = 0.99;
  CHECK(classify_limit(r, 1.0) == LimitClass::SelectsStateConstraint);
  r.extrapolated = 0.5;
  r.records.back().kirchhoff_sum = 0.01;
  CHECK(classify_limit(r, 1.0) == LimitClass::KirchhoffLimit);
  r.records.back().kirchhoff_sum = 0.3;
  CHECK(classify_limit(r, 1.0) == LimitClass::Undetermined);
  r.extrapolated = 1.5;
  CHECK(classify_limit(r, 1.0) == LimitClass::Undetermined);

  std::vector<SweepRecord> two(2);
  two[0].epsilon = 0.1;
  two[0].node_value = 0.8;
  two[1].epsilon = 0.05;
  two[1].node_value = 0.9;
  CHECK(extrapolate_node_value(two) == Approx(1.0));
}

TEST_CASE("epsilon_sweep input checks") {
  auto const abs1 = builtin("abs_shift", 0, 1);
  auto const p = star({abs1, abs1}, 400, Dirichlet{0.0});
  CHECK_THROWS_AS(epsilon_sweep(p, {0.1, 0.2, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_sweep(p, {0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_sweep(star({abs1, abs1}, 40, Dirichlet{0.0}), {0.2, 0.1, 0.05}),
                  std::invalid_argument);
  auto const sc = star({abs1, abs1}, 400, StateConstraint{});
  CHECK_THROWS_AS(epsilon_sweep(sc, {0.2, 0.1, 0.05}), std::invalid_argument);
}

TEST_CASE("sweep on the abs star selects the state-constraint solution") {
  auto const p = builtin_fixture("viscous_abs").junction_problem();
  auto const r = epsilon_sweep(p, {0.2, 0.1, 0.05, 0.025});
  REQUIRE(r.all_converged());
  CHECK(r.predicted == Selection::SelectsStateConstraint);
  CHECK(r.classification == LimitClass::SelectsStateConstraint);
  for (std::size_t k = 1; k < r.records.size(); ++k) {
    CHECK(r.records[k].node_value > r.records[k - 1].node_value);
    CHECK(std::abs(r.records[k].node_value - r.sc_reference) <
          std::abs(r.records[k - 1].node_value - r.sc_reference));
  }
  for (auto const& rec : r.records) {
    CHECK(rec.node_residual <= 1e-8);
    CHECK(rec.interior_residual <= 1e-8);
    CHECK(rec.lipschitz <= 2.0 * p.hamiltonians[0].coercivity_bound() + 1.0);
  }
  CHECK(std::abs(r.extrapolated - r.sc_reference) <= 5e-2);
}

TEST_CASE("sweep on the quadratic star reaches a Kirchhoff limit") {
  auto const p = builtin_fixture("viscous_quadratic").junction_problem();
  auto const r = epsilon_sweep(p, {0.2, 0.1, 0.05, 0.025});
  REQUIRE(r.all_converged());
  CHECK(r.predicted == Selection::NoGuarantee);
  CHECK(r.classification == LimitClass::KirchhoffLimit);
  CHECK(r.extrapolated < r.sc_reference - 0.05);
  CHECK(std::abs(r.records.back().kirchhoff_sum) <= 5e-2);
  for (std::size_t k = 2; k < r.records.size(); ++k) {
    CHECK(std::abs(r.records[k].node_value - r.records[k - 1].node_value) <=
          std::abs(r.records[k - 1].node_value - r.records[k - 2].node_value) + 1e-9);
  }
}

TEST_CASE("single-edge symmetric sweep is flat") {
  auto const p = star({builtin("abs_shift", 0, 1)}, 400);
  auto const r = epsilon_sweep(p, {0.2, 0.1, 0.05});
  REQUIRE(r.all_converged());
  for (auto const& rec : r.records) {
    CHECK(rec.node_value == Approx(r.records.front().node_value).epsilon(1e-8));
  }
}

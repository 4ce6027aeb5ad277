#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hjj/expression.hpp"
#include "hjj/hamiltonian.hpp"

using namespace hjj;
using doctest::Approx;

namespace {

Hamiltonian builtin(char const* family, double b, double c) {
  double const p[2] = {b, c};
  return make_builtin(family, p);
}

}  // namespace

TEST_CASE("expression evaluation and errors") {
  Expression const e("max(abs(p)-1, 0) + x", {"p", "x"});
  double const v[2] = {2.0, 0.5};
  CHECK(e(v) == Approx(1.5));

  Expression const pw("-2^2 + 2^-1", {"p"});
  double const z[1] = {0.0};
  CHECK(pw(z) == Approx(-3.5));

  CHECK_THROWS_AS(Expression("abs(p", {"p"}), ParseError);
  CHECK_THROWS_WITH_AS(Expression("p + q", {"p"}), doctest::Contains("unknown identifier 'q'"),
                       ParseError);
  CHECK_THROWS_WITH_AS(Expression("max(p)", {"p"}), doctest::Contains("expects"), ParseError);
  try {
    Expression("p + $", {"p"});
    FAIL("no error");
  } catch (ParseError const& err) {
    CHECK(err.position() == 4);
  }
}

TEST_CASE("builtin families") {
  auto const a = builtin("abs_shift", 0, 1);
  CHECK(a(1.0, 0.0) == 0.0);
  CHECK(a.minima() == std::vector<double>{0.0});
  CHECK(a.shape().convex);

  auto const w = builtin("double_well", -2, 0);
  CHECK(w(-3.0, 0.0) == 0.0);
  CHECK(w(-1.0, 0.0) == 0.0);
  CHECK(w.minima() == std::vector<double>{-3.0, -1.0});
  CHECK_FALSE(w.shape().convex);
  CHECK_FALSE(w.shape().quasiconvex);

  auto const q = builtin("quadratic", 1, 1);
  CHECK(q(1.0, 0.0) == -1.0);
  CHECK(q.minima() == std::vector<double>{1.0});

  CHECK_THROWS_WITH_AS(builtin("cubic", 0, 0), doctest::Contains("cubic"), HamiltonianError);
  double const one[1] = {1.0};
  CHECK_THROWS_AS(make_builtin("abs_shift", one), HamiltonianError);
}

TEST_CASE("parse_expression") {
  CHECK(parse_expression("abs(p) - 1")(1.0, 0.0) == 0.0);
  CHECK(parse_expression("(p-1)^2 - 1")(1.0, 0.0) == -1.0);
  CHECK(parse_expression("max(abs(p)-1, 0) + x", 1.0)(2.0, 0.5) == Approx(1.5));
  auto const h = parse_expression("(p-1)^2 - 1");
  REQUIRE(h.minima().size() == 1);
  CHECK(h.minima()[0] == Approx(1.0).epsilon(1e-6));
  CHECK(h.shape().convex);
}

TEST_CASE("probe_coercivity") {
  std::vector<double> const xs{0.0};
  CHECK(probe_coercivity(builtin("abs_shift", 0, 1), 1.0, xs) == Approx(2.0).epsilon(1e-3));
  CHECK(probe_coercivity(builtin("quadratic", 1, 1), 3.0, xs) == Approx(3.0).epsilon(1e-3));
  Hamiltonian::Fn const bounded = [](double p, double) { return std::sin(p); };
  CHECK_THROWS_WITH_AS(probe_coercivity(bounded, 1.5, xs), doctest::Contains("not coercive"),
                       HamiltonianError);
  CHECK_THROWS_AS(parse_expression("sin(p)"), HamiltonianError);
}

TEST_CASE("find_minima") {
  auto near = [](std::vector<double> const& got, std::vector<double> const& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(std::abs(got[k] - want[k]) <= 1e-6);
    }
  };
  near(find_minima(builtin("abs_shift", 0, 1), 4.0), {0.0});
  near(find_minima(builtin("double_well", -2, 0), 6.0), {-3.0, -1.0});
  near(find_minima(builtin("quadratic", 1, 1), 4.0), {1.0});
  near(find_minima(parse_expression("((p+2)^2-1)^2"), 6.0), {-3.0, -1.0});
}

TEST_CASE("nonincreasing_part") {
  auto const a = nonincreasing_part(builtin("abs_shift", 0, 1));
  CHECK(a(-2.0, 0.0) == 1.0);
  CHECK(a(0.0, 0.0) == -1.0);
  CHECK(a(5.0, 0.0) == -1.0);
  CHECK(nonincreasing_part(builtin("quadratic", 1, 1))(3.0, 0.0) == -1.0);
  CHECK_THROWS_WITH_AS(nonincreasing_part(builtin("double_well", 0, 0)),
                       doctest::Contains("flux limiter requires quasiconvex H"), HamiltonianError);

  auto const h = builtin("quadratic", 0.3, 0.5);
  auto const hm = nonincreasing_part(h);
  for (double p = -3.0; p < 3.0; p += 0.01) {
    CHECK(hm(p, 0.0) == h(std::min(p, 0.3), 0.0));
    CHECK(hm(p, 0.0) >= hm(p + 0.01, 0.0) - 1e-12);
  }
}

TEST_CASE("flux limiter") {
  std::vector<Hamiltonian> const hs{builtin("abs_shift", 0, 1), builtin("abs_shift", 0, 1)};
  auto const f = make_flux_limiter(hs, -0.5);
  double const origin[2] = {0.0, 0.0};
  CHECK(f(origin) == -0.5);
  auto const g = make_flux_limiter(hs, -2.0);
  double const p[2] = {-3.0, 0.0};
  CHECK(g(p) == 2.0);

  std::vector<Hamiltonian> const one{builtin("abs_shift", 0, 1)};
  auto const k1 = make_flux_limiter(one, -1.0);
  for (double q = -3.0; q <= 0.0; q += 0.25) {
    double const s[1] = {q};
    CHECK(k1(s) == std::abs(q) - 1.0);
  }

  for (double a = -2.0; a <= 2.0; a += 0.5) {
    for (double b = -2.0; b < 2.0; b += 0.5) {
      double const s0[2] = {a, b};
      double const s1[2] = {a, b + 0.5};
      double const s2[2] = {a + 0.5, b};
      CHECK(g(s1) <= g(s0));
      CHECK(g(s2) <= g(s0));
    }
  }
  std::vector<Hamiltonian> const bad{builtin("double_well", 0, 0)};
  CHECK_THROWS_AS(make_flux_limiter(bad, 0.0), HamiltonianError);
}

TEST_CASE("reduce_2d") {
  auto const h = parse_expression_2d("p1^2 + 10*p2^2");
  auto const h1 = reduce_2d(h, 1);
  auto const h2 = reduce_2d(h, 2);
  for (double p = -2.0; p <= 2.0; p += 0.25) {
    CHECK(h1(p, 0.0) == Approx(p * p).epsilon(1e-9));
    CHECK(h2(p, 0.0) == Approx(10 * p * p).epsilon(1e-9));
  }
  CHECK(h(1.0, 1.0, 0.0, 0.0) == 11.0);
  CHECK(std::max(h1(1.0, 0.0), h2(1.0, 0.0)) == 10.0);

  auto const m = reduce_2d(parse_expression_2d("max(abs(p1)-1, abs(p2)-2)"), 1);
  for (double p = -4.0; p <= 4.0; p += 0.5) {
    CHECK(m(p, 0.0) == Approx(std::max(std::abs(p) - 1.0, -2.0)));
  }
  CHECK(reduce_2d(parse_expression_2d("p1^2 + p2^2"), 1)(0.0, 0.0) == Approx(0.0));

  auto const g = parse_expression_2d("(p1 - p2)^2 + abs(p2) - 1 + 0.3*x1");
  auto const g1 = reduce_2d(g, 1);
  for (double p1 = -2.0; p1 <= 2.0; p1 += 0.5) {
    for (double p2 = -2.0; p2 <= 2.0; p2 += 0.1) {
      CHECK(g1(p1, -0.5) <= g(p1, p2, -0.5, 0.0) + 1e-9);
    }
  }
  CHECK_THROWS_WITH_AS(reduce_2d(h, 1, 8), doctest::Contains("resolution too coarse"),
                       HamiltonianError);
}

TEST_CASE("rightward_min_threshold") {
  CHECK(std::abs(rightward_min_threshold(builtin("abs_shift", 0, 1))) <= 1e-6);
  CHECK(rightward_min_threshold(builtin("quadratic", 1, 1)) == Approx(1.0).epsilon(1e-6));
  CHECK(rightward_min_threshold(builtin("double_well", -2, 0)) == Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("invariants of the builtin families") {
  for (auto const& h : {builtin("abs_shift", 0.5, 1), builtin("quadratic", -1, 2),
                        builtin("double_well", 0, 0.5), parse_expression("abs(p) - 1 - 0.5*x")}) {
    double const p = h.coercivity_bound();
    for (double x : h.x_samples()) {
      CHECK(h(p, x) >= h.coercivity_level());
      CHECK(h(-p, x) >= h.coercivity_level());
      for (double q = -p; q <= p; q += p / 64) {
        CHECK(std::isfinite(h(q, x)));
      }
    }
    CHECK(std::is_sorted(h.minima().begin(), h.minima().end()));
    for (double m : h.minima()) {
      CHECK(std::abs(m) < p);
    }
  }
}

TEST_CASE("minima override and domain") {
  auto const h = builtin("quadratic", 1, 1).with_minima({0.5});
  CHECK(h.minima() == std::vector<double>{0.5});
  CHECK(h.minima_overridden());
  auto const d = parse_expression("abs(p) - 1 - x").with_domain(2.0);
  CHECK(d.domain_length() == 2.0);
  CHECK(d.x_samples().front() == -2.0);
  CHECK(d.coercivity_bound() >= 3.0);
}

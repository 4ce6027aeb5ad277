#include "hjj/fixtures.hpp"

#include <stdexcept>

namespace hjj {
namespace {

HamiltonianSpec family(char const* name, double b, double c) { return {name, b, c, "", {}}; }
HamiltonianSpec expression(char const* src) { return {"expression", 0.0, 0.0, src, {}}; }

EdgeEntry edge(HamiltonianSpec h, FarBC bc = Neumann{0.0}, double length = 1.0, int n = 400) {
  return EdgeEntry{length, n, bc, std::move(h)};
}

ProblemFile make(std::string name, std::vector<EdgeEntry> edges) {
  ProblemFile p;
  p.name = std::move(name);
  p.edges = std::move(edges);
  return p;
}

ProblemFile raw_fixture(std::string const& name) {
  if (name == "abs_pair") {
    return make(name, {edge(family("abs_shift", 0, 1)), edge(family("abs_shift", 0, 2))});
  }
  if (name == "abs_mixed3") {
    return make(name, {edge(family("abs_shift", 0.5, 1)),
                       edge(family("abs_shift", -0.5, 1.5), Dirichlet{0.0}, 1.5),
                       edge(family("abs_shift", 0, 0.5), StateConstraint{}, 0.75)});
  }
  if (name == "quadratic_pair") {
    return make(name, {edge(family("quadratic", 1, 1)),
                       edge(family("quadratic", -0.5, 2), Dirichlet{-1.0})});
  }
  if (name == "double_well_pair") {
    return make(name, {edge(family("double_well", 0, 0.5)), edge(family("double_well", 1, 1))});
  }
  if (name == "x_dependent") {
    return make(name, {edge(expression("abs(p) - 1 - 0.5*x")),
                       edge(family("quadratic", -0.5, 2), Neumann{0.0}, 1.5)});
  }
  if (name == "flux_abs") {
    auto p = make(name, {edge(family("abs_shift", 0, 1)), edge(family("abs_shift", 0, 1))});
    p.junction = JunctionCondition::flux_limited(-0.5);
    return p;
  }
  if (name == "flux_mixed") {
    auto p = make(name, {edge(family("quadratic", 1, 1)), edge(family("quadratic", -0.5, 0.5)),
                         edge(family("abs_shift", 0, 1.5), Dirichlet{0.0})});
    p.junction = JunctionCondition::flux_limited(-0.2);
    return p;
  }
  if (name == "flux_high") {
    auto p = make(name, {edge(family("abs_shift", 0, 1)), edge(family("quadratic", 0, 2))});
    p.junction = JunctionCondition::flux_limited(0.5);
    return p;
  }
  if (name == "viscous_abs") {
    auto p = make(name, {edge(family("abs_shift", 0, 1), Dirichlet{0.0}),
                         edge(family("abs_shift", 0, 1), Dirichlet{0.0})});
    p.viscous = ViscousSpec{{0.2, 0.1, 0.05, 0.025}};
    return p;
  }
  if (name == "viscous_quadratic") {
    auto p = make(name, {edge(family("quadratic", 1, 1)), edge(family("quadratic", 1, 1))});
    p.viscous = ViscousSpec{{0.2, 0.1, 0.05, 0.025}};
    return p;
  }
  if (name == "viscous_quadratic_dirichlet") {
    auto p = make(name, {edge(family("quadratic", 1, 1), Dirichlet{-1.0}),
                         edge(family("quadratic", 1, 1), Dirichlet{-1.0})});
    p.viscous = ViscousSpec{{0.2, 0.1, 0.05, 0.025}};
    return p;
  }
  if (name == "fatten_max") {
    auto p = make(name, {edge(family("abs_shift", 0, 1)), edge(family("abs_shift", 0, 2))});
    p.fatten = FattenSpec{"max(abs(p1) - 1, abs(p2) - 2)", {0.2, 0.1}, 8.0, 1.0, 1.0};
    return p;
  }
  if (name == "dirichlet_convergence") {
    auto p = make(name, {edge(family("abs_shift", 0, 1))});
    p.node_bc = Dirichlet{0.0};
    p.convergence = ConvergenceSpec{{100, 200, 400}, "1 - exp(x)"};
    return p;
  }
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

}  // namespace

std::vector<std::string> state_constraint_fixture_names() {
  return {"abs_pair", "abs_mixed3", "quadratic_pair", "double_well_pair", "x_dependent"};
}

std::vector<std::string> flux_limited_fixture_names() {
  return {"flux_abs", "flux_mixed", "flux_high"};
}

std::vector<std::string> fixture_names() {
  auto out = state_constraint_fixture_names();
  for (auto const& n : flux_limited_fixture_names()) {
    out.push_back(n);
  }
  for (char const* n : {"viscous_abs", "viscous_quadratic", "viscous_quadratic_dirichlet",
                        "fatten_max", "dirichlet_convergence"}) {
    out.push_back(n);
  }
  return out;
}

ProblemFile builtin_fixture(std::string const& name) {
  return parse_problem(write_problem(raw_fixture(name)));
}

}  // namespace hjj

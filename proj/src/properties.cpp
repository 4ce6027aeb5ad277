#include "hjj/properties.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "hjj/fatten2d.hpp"
#include "hjj/scheme.hpp"

namespace hjj {
namespace {

constexpr double kSlack = 1e-12;

std::vector<Hamiltonian> sample_hamiltonians() {
  std::vector<Hamiltonian> out;
  auto add = [&](char const* family, double b, double c) {
    double const p[2] = {b, c};
    out.push_back(make_builtin(family, p));
  };
  add("abs_shift", 0.0, 1.0);
  add("abs_shift", 0.5, 2.0);
  add("quadratic", 1.0, 1.0);
  add("quadratic", -0.5, 0.3);
  add("double_well", 0.0, 0.5);
  add("double_well", -1.0, 0.0);
  out.push_back(parse_expression("abs(p) - 1 - 0.5*x"));
  out.push_back(parse_expression("(p - x)^2 + sin(3*p) - 1"));
  return out;
}

/// Slope with H(p, x) at or below the coercivity level.
double draw_slope(std::mt19937_64& rng, Hamiltonian const& h, double x) {
  std::uniform_real_distribution<double> u(-h.coercivity_bound(), h.coercivity_bound());
  for (int k = 0; k < 1000; ++k) {
    double const p = u(rng);
    if (h(p, x) <= h.coercivity_level()) {
      return p;
    }
  }
  return h.minima().empty() ? 0.0 : h.minima().front();
}

void record(MonotonicityResult& r, double change, double scale) {
  if (change < -kSlack * (1.0 + scale)) {
    ++r.failures;
  }
  r.worst = std::min(r.worst, change);
}

}  // namespace

MonotonicityResult check_monotone_interior_1d(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  auto const hs = sample_hamiltonians();
  std::vector<std::unique_ptr<StarScheme>> schemes;
  for (auto const& h : hs) {
    schemes.push_back(std::make_unique<StarScheme>(std::vector<Hamiltonian>{h},
                                                   std::vector<EdgeSpec>{EdgeSpec{1.0, 64}},
                                                   StateConstraint{}));
  }
  std::uniform_int_distribution<std::size_t> pick(0, schemes.size() - 1);
  std::uniform_int_distribution<int> row(1, 63);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MonotonicityResult r{"1-D interior"};
  for (int t = 0; t < trials; ++t) {
    auto const& s = *schemes[pick(rng)];
    int const j = row(rng);
    double const h = s.h(0);
    double const x = s.edge(0).x(j);
    double const dt = s.explicit_dt(0.9);
    double const u = 4.0 * unit(rng) - 2.0;
    double const um = u - h * draw_slope(rng, s.hamiltonian(0), x);
    double const up = u + h * draw_slope(rng, s.hamiltonian(0), x);
    auto g = [&](double a, double b, double c) { return b - dt * s.row(0, j, a, b, c); };
    double const base = g(um, u, up);
    double const d = 0.05 * h * unit(rng) + 1e-9;
    record(r, g(um + d, u, up) - base, std::abs(base));
    record(r, g(um, u + d, up) - base, std::abs(base));
    record(r, g(um, u, up + d) - base, std::abs(base));
    ++r.trials;
  }
  return r;
}

MonotonicityResult check_monotone_node_1d(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  auto const hs = sample_hamiltonians();
  std::uniform_int_distribution<std::size_t> pick(0, hs.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::unique_ptr<StarScheme>> schemes;
  for (int k = 0; k < 12; ++k) {
    int const edges = 2 + k % 2;
    std::vector<Hamiltonian> chosen;
    std::vector<EdgeSpec> specs;
    for (int i = 0; i < edges; ++i) {
      chosen.push_back(hs[pick(rng)]);
      specs.push_back(EdgeSpec{1.0, 64});
    }
    schemes.push_back(std::make_unique<StarScheme>(chosen, specs, StateConstraint{}));
  }
  std::uniform_int_distribution<std::size_t> pick_scheme(0, schemes.size() - 1);

  MonotonicityResult r{"1-D node"};
  for (int t = 0; t < trials; ++t) {
    auto const& s = *schemes[pick_scheme(rng)];
    int const k = s.edges();
    double const dt = s.explicit_dt(0.9);
    double const u0 = 4.0 * unit(rng) - 2.0;
    std::vector<double> last(k);
    std::vector<double> second(k);
    for (int i = 0; i < k; ++i) {
      last[i] = u0 - s.h(i) * draw_slope(rng, s.hamiltonian(i), 0.0);
      second[i] = last[i] - s.h(i) * draw_slope(rng, s.hamiltonian(i), 0.0);
    }
    auto g = [&](double v, std::vector<double> const& l) {
      return v - dt * s.node_row(v, l, second);
    };
    double const base = g(u0, last);
    double const d = 0.05 * s.h(0) * unit(rng) + 1e-9;
    record(r, g(u0 + d, last) - base, std::abs(base));
    for (int i = 0; i < k; ++i) {
      auto bumped = last;
      bumped[i] += d;
      record(r, g(u0, bumped) - base, std::abs(base));
    }
    ++r.trials;
  }
  return r;
}

MonotonicityResult check_monotone_interior_2d(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  auto dom = std::make_shared<FatDomain const>(build_fat_domain(1.0, 1.0, 0.2, 0.05));
  std::vector<std::unique_ptr<FatScheme>> schemes;
  for (char const* e : {"max(abs(p1)-1, abs(p2)-2)", "p1^2 + 10*p2^2 - 2",
                        "(p1^2 - 1)^2 + p2^2 - 0.5 + 0.3*x1", "abs(p1 - 0.5*p2) + p2^2 - 1 - x2"}) {
    schemes.push_back(std::make_unique<FatScheme>(parse_expression_2d(e), dom));
  }
  std::vector<int> interior;
  for (std::size_t c = 0; c < dom->cells.size(); ++c) {
    auto const& cell = dom->cells[c];
    if (cell.left >= 0 && cell.right >= 0 && cell.down >= 0 && cell.up >= 0) {
      interior.push_back(static_cast<int>(c));
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, schemes.size() - 1);
  std::uniform_int_distribution<std::size_t> cell_pick(0, interior.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double const h = dom->h2;

  MonotonicityResult r{"2-D interior"};
  std::vector<double> u(dom->cells.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    auto const& s = *schemes[pick(rng)];
    double const bound = 0.9 * s.bound();
    int const c = interior[cell_pick(rng)];
    auto const& cell = dom->cells[c];
    double const centre = 4.0 * unit(rng) - 2.0;
    auto slope = [&] { return bound * (2.0 * unit(rng) - 1.0); };
    u[c] = centre;
    u[cell.left] = centre - h * slope();
    u[cell.right] = centre + h * slope();
    u[cell.down] = centre - h * slope();
    u[cell.up] = centre + h * slope();
    double const dt = s.dt(0.9);
    double const base = s.update(c, u, dt);
    double const d = 0.05 * h * unit(rng) + 1e-9;
    for (int nb : {c, cell.left, cell.right, cell.down, cell.up}) {
      u[nb] += d;
      record(r, s.update(c, u, dt) - base, std::abs(base));
      u[nb] -= d;
    }
    ++r.trials;
  }
  return r;
}

std::vector<ShiftRecord> shift_comparison(JunctionGridFunction const& u,
                                          JunctionProblem const& problem,
                                          std::vector<double> const& lambdas,
                                          SolveParams const& params) {
  NodeCondition node = StateConstraint{};
  if (problem.condition.kind == JunctionCondition::Kind::FluxLimited) {
    node = junction_flux_limiter(problem);
  }
  StarScheme const scheme(problem.hamiltonians, problem.edges, node, params.theta);
  double const tol = std::max(10.0 * params.tol, 1e-7);

  std::vector<ShiftRecord> out;
  for (double magnitude : lambdas) {
    for (double lambda : {-magnitude, magnitude}) {
      ShiftRecord rec;
      rec.lambda = lambda;
      JunctionGridFunction shifted = u.shifted(lambda);
      StarVector const res = evaluate_residual(scheme, shifted);
      rec.max_residual = -std::numeric_limits<double>::infinity();
      rec.min_residual = std::numeric_limits<double>::infinity();
      auto visit = [&](double v) {
        rec.max_residual = std::max(rec.max_residual, v);
        rec.min_residual = std::min(rec.min_residual, v);
      };
      visit(res.node);
      for (auto const& e : res.edge) {
        for (double v : e) {
          visit(v);
        }
      }
      rec.excess = lambda < 0.0 ? compare_grid_functions(shifted, u)
                                : compare_grid_functions(u, shifted);
      JunctionGridFunction back = shifted;
      SolveReport const rep = solve_star(scheme, back, params);
      rec.return_distance = max_distance(back, u);
      bool const sign_ok = lambda < 0.0 ? rec.max_residual <= tol : rec.min_residual >= -tol;
      rec.ok = sign_ok && rec.excess <= tol && rep.converged && rec.return_distance <= 1e-5;
      out.push_back(rec);
    }
  }
  return out;
}

}  // namespace hjj

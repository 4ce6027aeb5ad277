#include "hjj/fatten2d.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include "hjj/edge_solver.hpp"
#include "hjj/parallel.hpp"
#include "hjj/scheme.hpp"

namespace hjj {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMinSamples = 24;
constexpr int kNestedSamples = 12;

bool is_multiple(double value, double step) {
  double const r = value / step;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

int steps(double value, double step) { return static_cast<int>(std::lround(value / step)); }

template <class F>
double sampled_min(F const& f, double lo, double hi, int samples) {
  if (!(hi > lo)) {
    return f(lo);
  }
  double const dq = (hi - lo) / samples;
  int best = 0;
  double best_v = kInf;
  for (int k = 0; k <= samples; ++k) {
    double const v = f(k == samples ? hi : lo + k * dq);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  double const a = best == 0 ? lo : lo + (best - 1) * dq;
  double const b = best == samples ? hi : lo + (best + 1) * dq;
  return std::min(best_v, golden_section_min(f, a, b, 1e-9 * (1.0 + hi - lo)).second);
}

FatDomain rasterize(double a1, double a2, double epsilon, double h2, bool single_arm) {
  if (!(h2 > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("tube width and spacing must be positive");
  }
  if (h2 > epsilon / 4.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("h2 = " + std::to_string(h2) +
                                " leaves fewer than 4 cells across a tube of width " +
                                std::to_string(epsilon));
  }
  double const shortest = single_arm ? a1 : std::min(a1, a2);
  if (!(epsilon < shortest / 2.0)) {
    throw std::invalid_argument("tube width must be below half the shortest arm length");
  }
  if (!is_multiple(epsilon, h2) || !is_multiple(a1, h2) || (!single_arm && !is_multiple(a2, h2))) {
    throw std::invalid_argument("h2 must divide the tube width and the arm lengths");
  }

  FatDomain d;
  d.a1 = a1;
  d.a2 = single_arm ? epsilon : a2;
  d.epsilon = epsilon;
  d.h2 = h2;
  d.single_arm = single_arm;
  d.x1_min = -a1 - epsilon;
  d.x2_min = -d.a2 - epsilon;
  d.nx = steps(a1 + 2.0 * epsilon, h2) + 1;
  d.ny = steps(d.a2 + 2.0 * epsilon, h2) + 1;
  d.axis_col = steps(a1 + epsilon, h2);
  d.axis_row = steps(d.a2 + epsilon, h2);

  double const half = 0.5 * epsilon + 1e-9 * h2;
  double const slack = 1e-9 * h2;
  auto inside = [&](double x1, double x2) {
    bool const arm1 = x1 >= -a1 - slack && x1 <= half && std::abs(x2) <= half;
    bool const arm2 =
        !single_arm && std::abs(x1) <= half && x2 >= -a2 - slack && x2 <= half;
    return arm1 || arm2;
  };

  d.index.assign(static_cast<std::size_t>(d.nx) * d.ny, -1);
  for (int k = 0; k < d.ny; ++k) {
    for (int i = 0; i < d.nx; ++i) {
      if (inside(d.x1(i), d.x2(k))) {
        d.index[static_cast<std::size_t>(k) * d.nx + i] = static_cast<int>(d.cells.size());
        d.cells.push_back({i, k});
      }
    }
  }
  for (std::size_t c = 0; c < d.cells.size(); ++c) {
    auto& cell = d.cells[c];
    cell.left = d.at(cell.i - 1, cell.k);
    cell.right = d.at(cell.i + 1, cell.k);
    cell.down = d.at(cell.i, cell.k - 1);
    cell.up = d.at(cell.i, cell.k + 1);
    if (cell.left < 0 || cell.right < 0 || cell.down < 0 || cell.up < 0) {
      d.boundary.push_back(static_cast<int>(c));
    }
  }
  if (!d.connected()) {
    throw std::invalid_argument("fat domain mask is not connected");
  }
  return d;
}

GridFunction1D trace_on_gridline(GridFunction2D const& u, int axis) {
  FatDomain const& d = *u.domain;
  double const a = axis == 1 ? d.a1 : d.a2;
  int const n = steps(a, d.h2);
  EdgeSpec edge{a, n, StateConstraint{}};
  GridFunction1D out{edge, std::vector<double>(n + 1), GridRole::StateConstraint};
  for (int j = 0; j <= n; ++j) {
    int const cell = axis == 1 ? d.at(d.axis_col - n + j, d.axis_row)
                               : d.at(d.axis_col, d.axis_row - n + j);
    if (cell < 0) {
      throw std::logic_error("axis gridline leaves the fat domain");
    }
    out.values[j] = u.values[cell];
  }
  return out;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int FatDomain::at(int i, int k) const {
  if (i < 0 || k < 0 || i >= nx || k >= ny) {
    return -1;
  }
  return index[static_cast<std::size_t>(k) * nx + i];
}

bool FatDomain::connected() const {
  if (cells.empty()) {
    return false;
  }
  std::vector<char> seen(cells.size(), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    auto const& c = cells[queue.front()];
    queue.pop_front();
    for (int nb : {c.left, c.right, c.down, c.up}) {
      if (nb >= 0 && !seen[nb]) {
        seen[nb] = 1;
        ++count;
        queue.push_back(nb);
      }
    }
  }
  return count == cells.size();
}

int FatDomain::tube_cells() const {
  int const i = steps(a1 / 2.0 + epsilon, h2);
  int count = 0;
  for (int k = 0; k < ny; ++k) {
    count += at(i, k) >= 0;
  }
  return count;
}

FatDomain build_fat_domain(double a1, double a2, double epsilon, double h2) {
  return rasterize(a1, a2, epsilon, h2, false);
}

FatDomain build_arm_domain(double a, double epsilon, double h2) {
  return rasterize(a, 0.0, epsilon, h2, true);
}

double GridFunction2D::lipschitz() const {
  double lip = 0.0;
  for (std::size_t c = 0; c < values.size(); ++c) {
    auto const& cell = domain->cells[c];
    for (int nb : {cell.right, cell.up}) {
      if (nb >= 0) {
        lip = std::max(lip, std::abs(values[nb] - values[c]) / domain->h2);
      }
    }
  }
  return lip;
}

std::pair<double, double> dissipation_2d(Hamiltonian2D const& h, FatDomain const& dom) {
  double const b = 1.25 * h.coercivity_bound();
  int const n = 128;
  double const dp = 2.0 * b / n;
  std::size_t const stride = std::max<std::size_t>(1, dom.cells.size() / 24);
  double l1 = 0.0;
  double l2 = 0.0;
  for (std::size_t c = 0; c < dom.cells.size(); c += stride) {
    double const x1 = dom.x1(dom.cells[c].i);
    double const x2 = dom.x2(dom.cells[c].k);
    for (int a = 0; a <= n; ++a) {
      double const p1 = -b + a * dp;
      for (int k = 0; k <= n; ++k) {
        double const p2 = -b + k * dp;
        double const v = h(p1, p2, x1, x2);
        if (a < n) {
          l1 = std::max(l1, std::abs(h(p1 + dp, p2, x1, x2) - v) / dp);
        }
        if (k < n) {
          l2 = std::max(l2, std::abs(h(p1, p2 + dp, x1, x2) - v) / dp);
        }
      }
    }
  }
  return {l1, l2};
}

FatScheme::FatScheme(Hamiltonian2D h, std::shared_ptr<FatDomain const> dom, double theta1,
                     double theta2)
    : h_(std::move(h)), dom_(std::move(dom)), bound_(h_.coercivity_bound()) {
  if (theta1 > 0.0 && theta2 > 0.0) {
    theta1_ = theta1;
    theta2_ = theta2;
  } else {
    auto const [l1, l2] = dissipation_2d(h_, *dom_);
    theta1_ = theta1 > 0.0 ? theta1 : std::max(1.02 * l1, 1e-3);
    theta2_ = theta2 > 0.0 ? theta2 : std::max(1.02 * l2, 1e-3);
  }
}

double FatScheme::dt(double cfl) const {
  return cfl * dom_->h2 / (theta1_ + theta2_ + dom_->h2);
}

double FatScheme::residual(int id, std::vector<double> const& u) const {
  auto const& c = dom_->cells[id];
  double const h = dom_->h2;
  double const x1 = dom_->x1(c.i);
  double const x2 = dom_->x2(c.k);
  double const v = u[id];

  struct Slope {
    bool fixed = true;
    double q = 0.0;
    double lo = 0.0;
    double hi = 0.0;
  };
  double dissipation = 0.0;
  auto direction = [&](int back, int fwd, double theta) {
    Slope s;
    if (back >= 0 && fwd >= 0) {
      double const pm = (v - u[back]) / h;
      double const pp = (u[fwd] - v) / h;
      s.q = 0.5 * (pm + pp);
      dissipation += 0.5 * theta * (pp - pm);
    } else if (back >= 0) {
      double const pin = (v - u[back]) / h;
      s = {false, 0.0, pin, std::max(pin, bound_)};
    } else if (fwd >= 0) {
      double const pin = (u[fwd] - v) / h;
      s = {false, 0.0, std::min(pin, -bound_), pin};
    } else {
      s = {false, 0.0, -bound_, bound_};
    }
    return s;
  };
  Slope const s1 = direction(c.left, c.right, theta1_);
  Slope const s2 = direction(c.down, c.up, theta2_);

  double hv = 0.0;
  if (s1.fixed && s2.fixed) {
    hv = h_(s1.q, s2.q, x1, x2);
  } else if (s1.fixed) {
    hv = sampled_min([&](double q) { return h_(s1.q, q, x1, x2); }, s2.lo, s2.hi, kMinSamples);
  } else if (s2.fixed) {
    hv = sampled_min([&](double q) { return h_(q, s2.q, x1, x2); }, s1.lo, s1.hi, kMinSamples);
  } else {
    auto inner = [&](double q1) {
      return sampled_min([&](double q2) { return h_(q1, q2, x1, x2); }, s2.lo, s2.hi,
                         kNestedSamples);
    };
    hv = sampled_min(inner, s1.lo, s1.hi, kNestedSamples);
  }
  return v + hv - dissipation;
}

double FatScheme::update(int cell, std::vector<double> const& u, double step) const {
  return u[cell] - step * residual(cell, u);
}

FatSolution solve_fat_state_constraint(Hamiltonian2D const& h, FatDomain const& dom,
                                       SolveParams const& params, std::optional<double> initial) {
  auto const start = std::chrono::steady_clock::now();
  auto shared = std::make_shared<FatDomain const>(dom);
  FatScheme const scheme(h, shared, params.theta, params.theta);

  double guess = 0.0;
  if (initial) {
    guess = *initial;
  } else {
    double g = -kInf;
    for (auto const& c : dom.cells) {
      g = std::max(g, h(0.0, 0.0, dom.x1(c.i), dom.x2(c.k)));
    }
    guess = -g;
  }

  FatSolution out;
  out.u.domain = shared;
  out.u.values.assign(dom.cells.size(), guess);
  out.report.method = "explicit_2d";
  out.report.dt = scheme.dt(params.cfl);

  int const n = static_cast<int>(dom.cells.size());
  std::vector<double> r(n);
  for (long it = 0;; ++it) {
    double norm = 0.0;
    for (int c = 0; c < n; ++c) {
      r[c] = scheme.residual(c, out.u.values);
      norm = std::max(norm, std::abs(r[c]));
    }
    out.report.final_residual = norm;
    out.report.iterations = it;
    if (!std::isfinite(norm)) {
      out.report.flags.push_back("diverged");
      break;
    }
    if (norm <= params.tol) {
      out.report.converged = true;
      break;
    }
    if (it >= params.max_iters) {
      out.report.flags.push_back("max_iters");
      break;
    }
    for (int c = 0; c < n; ++c) {
      out.u.values[c] -= out.report.dt * r[c];
    }
  }
  out.report.wall_time = elapsed(start);
  return out;
}

GridFunction1D extract_axis_trace(GridFunction2D const& u, int axis) {
  if (axis != 1 && axis != 2) {
    throw std::invalid_argument("axis must be 1 or 2");
  }
  if (axis == 2 && u.domain->single_arm) {
    throw std::invalid_argument("a single-arm domain has no second axis");
  }
  return trace_on_gridline(u, axis);
}

bool FatteningReport::all_converged() const {
  return std::all_of(records.begin(), records.end(),
                     [](FatteningRecord const& r) { return r.converged; });
}

bool FatteningReport::errors_nonincreasing(double floor) const {
  for (std::size_t k = 1; k < records.size(); ++k) {
    if (records[k].max_error() > std::max(records[k - 1].max_error(), floor)) {
      return false;
    }
  }
  return true;
}

FatteningReport fattening_study(Hamiltonian2D const& h, std::vector<double> const& eps_list,
                                FattenParams const& params) {
  auto const start = std::chrono::steady_clock::now();
  if (eps_list.empty()) {
    throw std::invalid_argument("eps_list is empty");
  }
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (!(eps_list[k] < eps_list[k - 1])) {
      throw std::invalid_argument("eps_list must decrease");
    }
  }
  if (!(params.h2_ratio >= 4.0)) {
    throw std::invalid_argument("h2_ratio must be at least 4");
  }

  Hamiltonian2D const h2 = h.with_arms(params.a1, params.a2);
  std::vector<FatDomain> domains;
  for (double eps : eps_list) {
    domains.push_back(build_fat_domain(params.a1, params.a2, eps, eps / params.h2_ratio));
  }

  std::vector<Hamiltonian> const reduced{reduce_2d(h2, 1, params.reduce_resolution),
                                         reduce_2d(h2, 2, params.reduce_resolution)};

  std::vector<int> refine(eps_list.size());
  std::map<std::pair<int, int>, JunctionSolution> references;
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    double const hh = domains[k].h2;
    refine[k] = std::max(1, static_cast<int>(std::ceil(hh * 400.0 - 1e-9)));
    int const n1 = steps(params.a1, hh) * refine[k];
    int const n2 = steps(params.a2, hh) * refine[k];
    if (!references.contains({n1, n2})) {
      auto const problem = make_junction_problem(
          "reduced", {EdgeSpec{params.a1, n1, StateConstraint{}}, EdgeSpec{params.a2, n2, StateConstraint{}}},
          reduced);
      references.emplace(std::pair{n1, n2}, solve_junction_direct(problem, params.solve));
    }
  }

  FatteningReport report;
  report.records.resize(eps_list.size());
  parallel_for(eps_list.size(), [&](std::size_t k) {
    auto const t0 = std::chrono::steady_clock::now();
    FatDomain const& dom = domains[k];
    FatteningRecord& rec = report.records[k];
    rec.epsilon = eps_list[k];
    rec.h2 = dom.h2;

    FatSolution const sol = solve_fat_state_constraint(h2, dom, params.solve);
    rec.converged = sol.report.converged;
    rec.iterations = sol.report.iterations;

    int const n1 = steps(params.a1, dom.h2);
    int const n2 = steps(params.a2, dom.h2);
    auto const& ref = references.at({n1 * refine[k], n2 * refine[k]});
    rec.reference_node_value = ref.u.node_value;
    double slopes[2] = {0.0, 0.0};
    for (int axis = 1; axis <= 2; ++axis) {
      GridFunction1D trace = extract_axis_trace(sol.u, axis);
      auto const& fine = ref.u.per_edge[axis - 1].values;
      double err = 0.0;
      for (std::size_t j = 0; j < trace.values.size(); ++j) {
        err = std::max(err, std::abs(trace.values[j] - fine[j * refine[k]]));
      }
      rec.trace_error[axis - 1] = err;

      StarScheme const scheme({reduced[axis - 1]}, {trace.edge}, StateConstraint{},
                              params.solve.theta);
      double res = 0.0;
      for (int j = 1; j < trace.n(); ++j) {
        res = std::max(res, std::abs(scheme.row(0, j, trace.values[j - 1], trace.values[j],
                                                trace.values[j + 1])));
      }
      rec.reduced_residual[axis - 1] = res;
      slopes[axis - 1] = node_slope(trace, 2);
      rec.traces[axis - 1] = std::move(trace);
    }
    rec.node_value = rec.traces[0].node_value();
    rec.junction_supersolution = rec.node_value + h2(slopes[0], slopes[1], 0.0, 0.0);
    rec.wall_time = elapsed(t0);
  });
  report.wall_time = elapsed(start);
  return report;
}

CounterexampleWitness counterexample_witness() {
  auto const h = parse_expression_2d("p1^2 + 10*p2^2");
  return {h(1.0, 1.0, 0.0, 0.0), reduce_2d(h, 1)(1.0, 0.0), reduce_2d(h, 2)(1.0, 0.0)};
}

}  // namespace hjj
